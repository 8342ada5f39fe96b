"""Agent discovery against a semantic catalog.

A catalog is a triple store where each agent is described by

    <agent> <urn:soas:servesDomain> "domain" .
    <agent> <urn:soas:endpoint> "tcp://host:port or inproc://name" .

Discovery builds a two-pattern semantic query from the request's domain and
chains the bindings: agents matching the domain pattern are substituted into
the endpoint pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import transport, vocab
from .errors import CatalogInvalid, NoAgentsFound
from .model import Term, TriplePattern, TripleStore, Var, iri, lit, load_triples
from .rpu import QueryModel


@dataclass(frozen=True, slots=True)
class AgentRecord:
    agent_iri: Term
    domain: str
    endpoint: str


@dataclass(frozen=True, slots=True)
class SemanticQuery:
    """Discovery query: a domain pattern and an endpoint pattern over ?a."""

    patterns: tuple[TriplePattern, TriplePattern]

    @property
    def domain(self) -> str:
        return self.patterns[0].object.value


def build_agent_query(model: QueryModel) -> SemanticQuery:
    agent = Var("a")
    return SemanticQuery(
        patterns=(
            TriplePattern(agent, iri(vocab.SERVES_DOMAIN), lit(model.domain)),
            TriplePattern(agent, iri(vocab.ENDPOINT), Var("e")),
        )
    )


def validate_catalog(catalog: TripleStore) -> None:
    """Every agent serving a domain needs exactly one parseable endpoint."""
    served = catalog.match(TriplePattern(Var("a"), iri(vocab.SERVES_DOMAIN), Var("d")))
    agents = sorted({binding["a"].value for binding in served})
    for agent_iri in agents:
        endpoints = catalog.match(
            TriplePattern(iri(agent_iri), iri(vocab.ENDPOINT), Var("e"))
        )
        if len(endpoints) != 1:
            raise CatalogInvalid(
                f"agent {agent_iri} must have exactly one endpoint, found {len(endpoints)}",
                agent_iri,
            )
        endpoint = endpoints[0]["e"]
        try:
            transport.parse_endpoint(endpoint.value)
        except ValueError as err:
            raise CatalogInvalid(f"agent {agent_iri}: {err}", agent_iri) from err


def load_catalog(path: str | Path) -> TripleStore:
    catalog = load_triples(path)
    validate_catalog(catalog)
    return catalog


def locate_agents(catalog: TripleStore, query: SemanticQuery) -> list[AgentRecord]:
    """Chain the query's patterns over the catalog.

    Bindings from the first pattern are substituted into the second, so each
    discovered agent pairs its domain with its endpoint.  Results come back
    sorted by agent IRI; an empty result raises NoAgentsFound.
    """
    domain_pattern, endpoint_pattern = query.patterns
    records: list[AgentRecord] = []
    for binding in catalog.match(domain_pattern):
        chained = endpoint_pattern.substitute(binding)
        for endpoint_binding in catalog.match(chained):
            records.append(
                AgentRecord(
                    agent_iri=binding["a"],
                    domain=query.domain,
                    endpoint=endpoint_binding["e"].value,
                )
            )
    records.sort(key=lambda record: record.agent_iri.value)
    if not records:
        raise NoAgentsFound(f"no agent serves domain {query.domain!r}")
    return records
