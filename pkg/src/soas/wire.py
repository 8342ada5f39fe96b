"""Newline-delimited JSON wire protocol between the pipeline and agents.

One exchange per connection: the client sends a single query line, the agent
answers with a single results (or error) line.  Terms travel as two-element
``[kind, value]`` arrays with kind ``"iri"`` or ``"lit"``; triples as
three-term arrays.  Every line is UTF-8 JSON, capped at 1 MiB including the
trailing newline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import InvalidTriple, MessageTooLarge, ProtocolError
from .model import Term, Triple, iri
from .rpu import QueryModel
from . import vocab

PROTOCOL_VERSION = 1
MAX_LINE_BYTES = 1 << 20

TYPE_QUERY = "query"
TYPE_RESULTS = "results"
TYPE_ERROR = "error"


@dataclass(frozen=True, slots=True)
class ResponseItem:
    title: str
    triples: tuple[Triple, ...]
    relevance: float


@dataclass(frozen=True, slots=True)
class AgentRequest:
    request_iri: str
    triples: tuple[Triple, ...]


@dataclass(frozen=True, slots=True)
class AgentResponse:
    request_iri: str
    items: tuple[ResponseItem, ...] = ()
    error_code: str | None = None
    error_message: str | None = None

    @property
    def is_error(self) -> bool:
        return self.error_code is not None


def encode_term(term: Term) -> list[str]:
    return [term.kind, term.value]


def decode_term(data: object) -> Term:
    if (
        not isinstance(data, list)
        or len(data) != 2
        or not all(isinstance(part, str) for part in data)
    ):
        raise ProtocolError(f"term must be a [kind, value] string pair, got {data!r}")
    try:
        return Term(data[0], data[1])
    except InvalidTriple as err:
        raise ProtocolError(str(err)) from err


def encode_triple(triple: Triple) -> list[list[str]]:
    return [encode_term(triple.subject), encode_term(triple.predicate), encode_term(triple.object)]


def decode_triple(data: object) -> Triple:
    if not isinstance(data, list) or len(data) != 3:
        raise ProtocolError(f"triple must be a three-term array, got {data!r}")
    try:
        return Triple(*(decode_term(part) for part in data))
    except InvalidTriple as err:
        raise ProtocolError(str(err)) from err


def _finish_line(payload: dict) -> bytes:
    line = json.dumps(payload, separators=(",", ":")).encode("utf-8") + b"\n"
    if len(line) > MAX_LINE_BYTES:
        raise MessageTooLarge(
            f"encoded line is {len(line)} bytes, limit is {MAX_LINE_BYTES}"
        )
    return line


def encode_request(model: QueryModel) -> bytes:
    """Encode a query model as one wire line (keys in v, type, id, triples order)."""
    payload = {
        "v": PROTOCOL_VERSION,
        "type": TYPE_QUERY,
        "id": model.request_iri.value,
        "triples": [encode_triple(t) for t in model.triples.sorted_triples()],
    }
    return _finish_line(payload)


def encode_response(response: AgentResponse) -> bytes:
    if response.is_error:
        payload = {
            "v": PROTOCOL_VERSION,
            "type": TYPE_ERROR,
            "id": response.request_iri,
            "code": response.error_code,
            "message": response.error_message or "",
        }
        return _finish_line(payload)
    payload = {
        "v": PROTOCOL_VERSION,
        "type": TYPE_RESULTS,
        "id": response.request_iri,
        "items": [
            {
                "title": item.title,
                "triples": [encode_triple(t) for t in item.triples],
                "relevance": item.relevance,
            }
            for item in response.items
        ],
    }
    return _finish_line(payload)


def _parse_object(data: bytes) -> dict:
    if len(data) > MAX_LINE_BYTES:
        raise MessageTooLarge(
            f"wire line is {len(data)} bytes, limit is {MAX_LINE_BYTES}"
        )
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ProtocolError(f"line is not valid JSON: {err}") from err
    if not isinstance(payload, dict):
        raise ProtocolError("wire line must be a JSON object")
    if payload.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {payload.get('v')!r}")
    if not isinstance(payload.get("id"), str):
        raise ProtocolError("message id must be a string")
    return payload


def decode_request(data: bytes) -> AgentRequest:
    """Decode and validate a query line (server side)."""
    payload = _parse_object(data)
    if payload.get("type") != TYPE_QUERY:
        raise ProtocolError(f"expected a query, got type {payload.get('type')!r}")
    raw_triples = payload.get("triples")
    if not isinstance(raw_triples, list) or not raw_triples:
        raise ProtocolError("query must carry a non-empty triples array")
    triples = tuple(decode_triple(entry) for entry in raw_triples)
    type_triple = any(
        t.predicate.value == vocab.RDF_TYPE
        and t.object == iri(vocab.REQUEST_CLASS)
        for t in triples
    )
    if not type_triple:
        raise ProtocolError("query triples carry no request type declaration")
    return AgentRequest(request_iri=payload["id"], triples=triples)


def _decode_item(entry: object) -> ResponseItem:
    if not isinstance(entry, dict):
        raise ProtocolError(f"result item must be an object, got {entry!r}")
    title = entry.get("title")
    if not isinstance(title, str):
        raise ProtocolError("result item title must be a string")
    raw_triples = entry.get("triples")
    if not isinstance(raw_triples, list):
        raise ProtocolError("result item triples must be an array")
    relevance = entry.get("relevance")
    if (
        isinstance(relevance, bool)
        or not isinstance(relevance, (int, float))
        or math.isnan(relevance)
        or not 0.0 <= relevance <= 1.0
    ):
        raise ProtocolError(f"relevance must be a number in [0, 1], got {relevance!r}")
    return ResponseItem(
        title=title,
        triples=tuple(decode_triple(part) for part in raw_triples),
        relevance=float(relevance),
    )


def decode_response(data: bytes, expected_id: str | None = None) -> AgentResponse:
    """Decode and validate a results or error line (client side).

    When `expected_id` is given, a reply for any other id is a protocol
    violation — replies can't be matched across exchanges.
    """
    payload = _parse_object(data)
    kind = payload.get("type")
    if expected_id is not None and payload["id"] != expected_id:
        raise ProtocolError(
            f"reply id {payload['id']!r} does not match request id {expected_id!r}"
        )
    if kind == TYPE_ERROR:
        code = payload.get("code")
        message = payload.get("message")
        if not isinstance(code, str) or not code:
            raise ProtocolError("error reply must carry a non-empty code")
        if not isinstance(message, str):
            raise ProtocolError("error reply message must be a string")
        return AgentResponse(
            request_iri=payload["id"], error_code=code, error_message=message
        )
    if kind != TYPE_RESULTS:
        raise ProtocolError(f"expected results or error, got type {kind!r}")
    raw_items = payload.get("items")
    if not isinstance(raw_items, list):
        raise ProtocolError("results reply must carry an items array")
    items = tuple(_decode_item(entry) for entry in raw_items)
    return AgentResponse(request_iri=payload["id"], items=items)
