"""Packaged demo data: a lexicon, an agent catalog, and knowledge bases.

`spawn_fixture_agents` brings the demo world to life in-process: every
catalog agent with packaged knowledge gets served on an inproc endpoint,
with tcp endpoints rewritten to inproc twins so no sockets are needed.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .. import vocab
from ..model import Triple, TripleStore, lit
from ..runtime import AgentHandle, load_knowledge_base, serve_agent

#: Knowledge file and domain for each demo agent in the packaged catalog.
AGENT_KNOWLEDGE = {
    "urn:soas:agent:a1": ("kb_travel1.nt", "travel"),
    "urn:soas:agent:a2": ("kb_travel2.nt", "travel"),
    "urn:soas:agent:a3": ("kb_finance.nt", "finance"),
}


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath(name)))


def default_lexicon_path() -> Path:
    return fixture_path("lexicon.tsv")


def default_catalog_path() -> Path:
    return fixture_path("catalog.nt")


def _inproc_twin(agent_iri: str) -> str:
    local = agent_iri.rsplit(":", 1)[-1]
    return f"inproc://fixture-{local}"


def spawn_fixture_agents(
    catalog: TripleStore,
) -> tuple[TripleStore, list[AgentHandle]]:
    """Serve the packaged knowledge bases behind the catalog's agents.

    Returns the catalog to actually query (tcp endpoints swapped for the
    spawned inproc twins) plus the live handles, in catalog order.  Close
    every handle when done.
    """
    rewritten = TripleStore()
    handles: list[AgentHandle] = []
    try:
        for triple in catalog:
            known = triple.subject.value in AGENT_KNOWLEDGE
            if known and triple.predicate.value == vocab.ENDPOINT:
                endpoint = triple.object.value
                if endpoint.startswith("tcp://"):
                    endpoint = _inproc_twin(triple.subject.value)
                kb_name, domain = AGENT_KNOWLEDGE[triple.subject.value]
                kb = load_knowledge_base(fixture_path(kb_name), domain)
                handles.append(serve_agent(kb, endpoint))
                rewritten.add(Triple(triple.subject, triple.predicate, lit(endpoint)))
            else:
                rewritten.add(triple)
    except BaseException:
        for handle in handles:
            handle.close()
        raise
    return rewritten, handles
