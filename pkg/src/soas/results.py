"""Append-only storage for agent results.

Records are grouped per request and keep their arrival order; nothing is
ever mutated or deleted, which the operations log makes checkable.  With a
journal path the store writes one JSON line per record and replays the file
on startup, so a restarted process sees its earlier results.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import JournalError, ProtocolError
from .model import Triple, TripleStore
from .wire import decode_triple, encode_triple


@dataclass(frozen=True)
class ResultRecord:
    request_iri: str
    agent_iri: str
    title: str
    triples: TripleStore
    relevance: float
    arrival_index: int


class ResultStore:
    """Per-request result lists; append and fetch are the only operations."""

    def __init__(self, journal_path: "str | Path | None" = None):
        self._lock = threading.Lock()
        self._records: dict[str, list[ResultRecord]] = {}
        self._operations: list[tuple[str, str, int]] = []
        self._journal = None
        if journal_path is not None:
            path = Path(journal_path)
            if path.exists():
                self._replay(path)
            self._journal = path.open("a", encoding="utf-8")

    # --- write side ---------------------------------------------------------

    def append(
        self,
        request_iri: str,
        agent_iri: str,
        title: str,
        triples: Iterable[Triple],
        relevance: float,
    ) -> ResultRecord:
        if not 0.0 <= relevance <= 1.0:
            raise ValueError(f"relevance must be in [0, 1], got {relevance!r}")
        with self._lock:
            bucket = self._records.setdefault(request_iri, [])
            record = ResultRecord(
                request_iri=request_iri,
                agent_iri=agent_iri,
                title=title,
                triples=TripleStore(triples),
                relevance=relevance,
                arrival_index=len(bucket),
            )
            bucket.append(record)
            self._operations.append(("append", request_iri, record.arrival_index))
            if self._journal is not None:
                self._journal.write(_journal_line(record))
                self._journal.flush()
        return record

    # --- read side ------------------------------------------------------------

    def fetch_results(self, request_iri: str) -> list[ResultRecord]:
        with self._lock:
            return list(self._records.get(request_iri, ()))

    @property
    def operations(self) -> tuple[tuple[str, str, int], ...]:
        """("append" | "load", request_iri, arrival_index) in event order."""
        with self._lock:
            return tuple(self._operations)

    # --- journal ---------------------------------------------------------------

    def _replay(self, path: Path) -> None:
        text = path.read_text(encoding="utf-8")
        for lineno, line in enumerate(text.split("\n"), start=1):
            line = line.removesuffix("\r")
            if not line:
                continue
            try:
                record = _parse_journal_line(line)
            except (JournalError, json.JSONDecodeError, ProtocolError) as err:
                raise JournalError(f"{path}:{lineno}: {err}") from err
            bucket = self._records.setdefault(record.request_iri, [])
            if record.arrival_index != len(bucket):
                raise JournalError(
                    f"{path}:{lineno}: arrival_index {record.arrival_index} does not "
                    f"continue the record sequence (expected {len(bucket)})"
                )
            bucket.append(record)
            self._operations.append(("load", record.request_iri, record.arrival_index))

    def close(self) -> None:
        with self._lock:
            if self._journal is not None:
                self._journal.close()
                self._journal = None

    def __enter__(self) -> "ResultStore":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def _journal_line(record: ResultRecord) -> str:
    payload = {
        "agent_iri": record.agent_iri,
        "arrival_index": record.arrival_index,
        "relevance": record.relevance,
        "request_iri": record.request_iri,
        "title": record.title,
        "triples": [encode_triple(t) for t in record.triples.sorted_triples()],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _parse_journal_line(line: str) -> ResultRecord:
    data = json.loads(line)
    if not isinstance(data, dict):
        raise JournalError("journal line must be a JSON object")
    request_iri = data.get("request_iri")
    agent_iri = data.get("agent_iri")
    title = data.get("title")
    relevance = data.get("relevance")
    arrival_index = data.get("arrival_index")
    triples = data.get("triples")
    if not all(isinstance(v, str) for v in (request_iri, agent_iri, title)):
        raise JournalError("request_iri, agent_iri, and title must be strings")
    if (
        isinstance(relevance, bool)
        or not isinstance(relevance, (int, float))
        or not 0.0 <= relevance <= 1.0
    ):
        raise JournalError(f"relevance must be a number in [0, 1], got {relevance!r}")
    if not isinstance(arrival_index, int) or isinstance(arrival_index, bool) or arrival_index < 0:
        raise JournalError(f"arrival_index must be a non-negative integer, got {arrival_index!r}")
    if not isinstance(triples, list):
        raise JournalError("triples must be an array")
    return ResultRecord(
        request_iri=request_iri,
        agent_iri=agent_iri,
        title=title,
        triples=TripleStore(decode_triple(entry) for entry in triples),
        relevance=float(relevance),
        arrival_index=arrival_index,
    )
