"""Reference domain agents.

An agent is a triple knowledge base plus the wire protocol: items are
grouped by subject, a query's constraints are matched against each item of
the requested type, and matches come back with a satisfied-constraint ratio
as their relevance.  `serve_agent` exposes a knowledge base on a tcp or
inproc endpoint, one exchange per connection.
"""

from __future__ import annotations

import json
import socketserver
import threading
from dataclasses import dataclass
from pathlib import Path

from . import transport, vocab
from .errors import BindFailed, KnowledgeBaseInvalid, MessageTooLarge, ProtocolError
from .model import Term, Triple, TripleStore, iri, load_triples
from .ranking import constraint_pairs
from .wire import (
    MAX_LINE_BYTES,
    AgentRequest,
    AgentResponse,
    ResponseItem,
    decode_request,
    encode_response,
)


@dataclass(frozen=True)
class KnowledgeItem:
    item_iri: Term
    title: str
    triples: TripleStore


@dataclass(frozen=True)
class KnowledgeBase:
    domain: str
    items: tuple[KnowledgeItem, ...]


def load_knowledge_base(path: str | Path, domain: str) -> KnowledgeBase:
    """Group a triple file by subject; every subject needs exactly one title."""
    store = load_triples(path)
    by_subject: dict[str, list[Triple]] = {}
    for triple in store:
        by_subject.setdefault(triple.subject.value, []).append(triple)
    items = []
    for subject in sorted(by_subject):
        triples = TripleStore(by_subject[subject])
        titles = [
            t.object
            for t in triples
            if t.predicate.value == vocab.TITLE and not t.object.is_iri
        ]
        if len(titles) != 1:
            raise KnowledgeBaseInvalid(
                f"{path}: item {subject} needs exactly one literal title, "
                f"found {len(titles)}"
            )
        items.append(KnowledgeItem(iri(subject), titles[0].value, triples))
    return KnowledgeBase(domain=domain, items=tuple(items))


def _bad_request(request_iri: str, message: str) -> AgentResponse:
    return AgentResponse(
        request_iri=request_iri, error_code="bad-request", error_message=message
    )


def answer_query(kb: KnowledgeBase, request: AgentRequest) -> AgentResponse:
    """Match one query against the knowledge base.

    Items qualify by carrying rdf:type of the query's target.  Relevance is
    the fraction of constraint pairs the item satisfies; with constraints
    present only items above zero are returned, without constraints every
    qualifying item comes back at relevance 1.0.  Items are ordered by
    relevance (descending), then item IRI.
    """
    targets = [
        t.object
        for t in request.triples
        if t.predicate.value == vocab.TARGET and t.object.is_iri
    ]
    if len(targets) != 1:
        return _bad_request(
            request.request_iri,
            f"query must carry exactly one IRI target, found {len(targets)}",
        )
    target = targets[0]
    constraints = constraint_pairs(request.triples)
    rdf_type = iri(vocab.RDF_TYPE)

    scored: list[tuple[float, KnowledgeItem]] = []
    for item in kb.items:
        if Triple(item.item_iri, rdf_type, target) not in item.triples:
            continue
        if constraints:
            satisfied = sum(
                1
                for predicate, obj in constraints
                if Triple(item.item_iri, predicate, obj) in item.triples
            )
            relevance = satisfied / len(constraints)
            if relevance > 0:
                scored.append((relevance, item))
        else:
            scored.append((1.0, item))
    scored.sort(key=lambda pair: (-pair[0], pair[1].item_iri.value))
    items = tuple(
        ResponseItem(
            title=item.title,
            triples=tuple(item.triples.sorted_triples()),
            relevance=relevance,
        )
        for relevance, item in scored
    )
    return AgentResponse(request_iri=request.request_iri, items=items)


def _peek_id(line: bytes) -> str:
    """Best-effort request id so even rejects can be matched to the query."""
    try:
        payload = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return ""
    if isinstance(payload, dict) and isinstance(payload.get("id"), str):
        return payload["id"]
    return ""


def handle_line(kb: KnowledgeBase, line: bytes) -> bytes:
    """One full exchange: query line in, results or error line out."""
    if len(line) > MAX_LINE_BYTES:
        return encode_response(
            _bad_request(_peek_id(line[:MAX_LINE_BYTES]), "request line too large")
        )
    try:
        request = decode_request(line)
    except ProtocolError as err:
        return encode_response(_bad_request(_peek_id(line), str(err)))
    try:
        response = answer_query(kb, request)
        return encode_response(response)
    except MessageTooLarge:
        return encode_response(
            AgentResponse(
                request_iri=request.request_iri,
                error_code="internal",
                error_message="results exceed the wire line limit",
            )
        )
    except Exception as err:  # never tear down the connection without a reply
        return encode_response(
            AgentResponse(
                request_iri=request.request_iri,
                error_code="internal",
                error_message=f"{type(err).__name__}: {err}",
            )
        )


class AgentHandle:
    """A running agent; `close` releases the endpoint and drains exchanges."""

    def __init__(self, endpoint: str, shutdown):
        self.endpoint = endpoint
        self._shutdown = shutdown

    def close(self) -> None:
        if self._shutdown is not None:
            self._shutdown()
            self._shutdown = None

    def __enter__(self) -> "AgentHandle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class _AgentTCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = False  # close() waits for in-flight exchanges

    def __init__(self, address, kb: KnowledgeBase):
        super().__init__(address, _AgentTCPHandler)
        self.kb = kb


class _AgentTCPHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        # readline caps at limit+1 so an oversized line is detectable.
        line = self.rfile.readline(MAX_LINE_BYTES + 1)
        if not line:
            return
        try:
            self.wfile.write(handle_line(self.server.kb, line))
        except (BrokenPipeError, ConnectionResetError):
            pass


def serve_agent(kb: KnowledgeBase, endpoint: str) -> AgentHandle:
    """Serve `kb` on a tcp or inproc endpoint until the handle is closed.

    tcp endpoints may use port 0 to bind an ephemeral port; the handle's
    `endpoint` reports the port actually bound.
    """
    parsed = transport.parse_endpoint(endpoint)
    if parsed[0] == "inproc":
        name = parsed[1]
        transport.register_inproc(name, lambda line: handle_line(kb, line))
        return AgentHandle(endpoint, lambda: transport.unregister_inproc(name))

    _, host, port = parsed
    try:
        server = _AgentTCPServer((host, port), kb)
    except OSError as err:
        raise BindFailed(f"cannot bind {endpoint}: {err}") from err
    thread = threading.Thread(
        target=server.serve_forever, name=f"agent-{endpoint}", daemon=True
    )
    thread.start()
    bound = f"tcp://{host}:{server.server_address[1]}"

    def shutdown() -> None:
        server.shutdown()
        server.server_close()
        thread.join()

    return AgentHandle(bound, shutdown)
