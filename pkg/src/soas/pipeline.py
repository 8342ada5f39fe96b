"""End-to-end orchestration: one free-text request in, one ranked report out.

A `Pipeline` loads its lexicon and catalog once, then runs each request
through a fixed stage sequence — normalize, tokenize, parse, reconstruct,
build the discovery query, locate agents, fan out, fetch, score, rank —
and folds the results into a `FinalReport`.  Stage failures surface as
`StageError` naming the stage that died.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .comm import OK, query_agents
from .errors import ConfigError, SoasError, StageError
from .locator import build_agent_query, load_catalog, locate_agents, validate_catalog
from .model import Triple, TripleStore
from .ranking import RankWeights, rank, score_item
from .results import ResultStore
from .rpu import Lexicon, load_lexicon, parse, read_request, reconstruct, tokenize
from .wire import encode_triple

DEFAULT_TIMEOUT_MS = 2000

OUTPUT_FORMATS = ("text", "json")


@dataclass(frozen=True)
class PipelineConfig:
    lexicon_path: Path
    catalog_path: Path
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    output_format: str = "text"
    weights: RankWeights = RankWeights()
    journal_path: Path | None = None

    def validate(self) -> None:
        if self.timeout_ms < 1:
            raise ConfigError(f"timeout_ms must be at least 1, got {self.timeout_ms}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(
                f"output format must be one of {', '.join(OUTPUT_FORMATS)}, "
                f"got {self.output_format!r}"
            )
        for label, path in (("lexicon", self.lexicon_path), ("catalog", self.catalog_path)):
            if not Path(path).is_file():
                raise ConfigError(f"{label} file not found: {path}")


@dataclass(frozen=True, slots=True)
class ResultRow:
    rank: int
    title: str
    agent_iri: str
    weight: float
    match_score: float
    relevance: float


@dataclass(frozen=True, slots=True)
class ContactedAgent:
    agent_iri: str
    status: str
    items: int


@dataclass(frozen=True)
class FinalReport:
    source_text: str
    request_iri: str
    domain: str
    query_triples: tuple[Triple, ...]
    agents_contacted: tuple[ContactedAgent, ...]
    results: tuple[ResultRow, ...]
    warnings: tuple[str, ...]


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except SoasError as err:
        raise StageError(name, err) from err


class Pipeline:
    """Configuration loaded once; `handle_request` runs any number of times.

    A pre-built catalog (e.g. rewritten for in-process demo agents) or a
    shared result store may be injected; otherwise both come from `cfg`.
    """

    def __init__(
        self,
        cfg: PipelineConfig,
        catalog: TripleStore | None = None,
        store: ResultStore | None = None,
    ):
        cfg.validate()
        self.cfg = cfg
        try:
            self.lexicon: Lexicon = load_lexicon(cfg.lexicon_path)
        except SoasError as err:
            raise ConfigError(f"lexicon: {err}") from err
        try:
            if catalog is None:
                catalog = load_catalog(cfg.catalog_path)
            else:
                validate_catalog(catalog)
        except SoasError as err:
            raise ConfigError(f"catalog: {err}") from err
        self.catalog = catalog
        self.store = store if store is not None else ResultStore(cfg.journal_path)

    def handle_request(self, raw_text: str) -> FinalReport:
        with _stage("read_request"):
            normalized = read_request(raw_text)
        with _stage("tokenize"):
            tokens = tokenize(normalized, self.lexicon)
        with _stage("parse"):
            content = parse(tokens)
        with _stage("reconstruct"):
            model = reconstruct(content, self.lexicon, raw_text, normalized)
        with _stage("build_agent_query"):
            query = build_agent_query(model)
        with _stage("locate_agents"):
            agents = locate_agents(self.catalog, query)
        with _stage("query_agents"):
            outcomes = query_agents(agents, model, self.cfg.timeout_ms, self.store)
        with _stage("fetch_results"):
            records = self.store.fetch_results(model.request_iri.value)
        with _stage("score"):
            scored = [score_item(model, record, self.cfg.weights) for record in records]
        with _stage("rank"):
            ranked = rank(scored)

        rows = tuple(
            ResultRow(
                rank=position,
                title=item.record.title,
                agent_iri=item.record.agent_iri,
                weight=item.weight,
                match_score=item.match_score,
                relevance=item.record.relevance,
            )
            for position, item in enumerate(ranked.results, start=1)
        )
        contacted = tuple(
            ContactedAgent(outcome.agent_iri, outcome.status, outcome.items)
            for outcome in outcomes
        )
        warnings = tuple(
            f"unrecognized: {token.lexeme}" for token in content.unrecognized
        ) + tuple(
            f"agent failed: {outcome.agent_iri} ({outcome.status})"
            for outcome in outcomes
            if outcome.status != OK
        )
        return FinalReport(
            source_text=model.source_text,
            request_iri=model.request_iri.value,
            domain=model.domain,
            query_triples=tuple(model.triples.sorted_triples()),
            agents_contacted=contacted,
            results=rows,
            warnings=warnings,
        )

    def close(self) -> None:
        self.store.close()

    def __enter__(self) -> "Pipeline":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def handle_request(raw_text: str, cfg: PipelineConfig) -> FinalReport:
    """One-shot convenience: build a pipeline, run one request."""
    with Pipeline(cfg) as pipeline:
        return pipeline.handle_request(raw_text)


# --- report rendering ---------------------------------------------------------


def _json_payload(report: FinalReport) -> dict:
    return {
        "source_text": report.source_text,
        "request_iri": report.request_iri,
        "domain": report.domain,
        "query_triples": [encode_triple(t) for t in report.query_triples],
        "agents_contacted": [
            {"agent": c.agent_iri, "status": c.status, "items": c.items}
            for c in report.agents_contacted
        ],
        "results": [
            {
                "rank": row.rank,
                "title": row.title,
                "agent": row.agent_iri,
                "weight": row.weight,
                "match_score": row.match_score,
                "relevance": row.relevance,
            }
            for row in report.results
        ],
        "warnings": list(report.warnings),
    }


def format_report(report: FinalReport, output_format: str = "text") -> str:
    """Render a report deterministically; equal reports yield equal bytes."""
    if output_format == "json":
        return json.dumps(_json_payload(report), sort_keys=True, separators=(",", ":")) + "\n"
    if output_format != "text":
        raise ConfigError(f"unknown output format {output_format!r}")
    lines = [
        f"request: {report.source_text}",
        f"request-iri: {report.request_iri}",
        f"domain: {report.domain}",
        "agents: "
        + "; ".join(
            f"{c.agent_iri} {c.status} ({c.items} items)"
            for c in report.agents_contacted
        ),
        "results:",
    ]
    if report.results:
        lines.extend(
            f"#{row.rank}  {row.weight:.4f}  {row.title}  ({row.agent_iri})"
            for row in report.results
        )
    else:
        lines.append("no results")
    lines.extend(f"warning: {warning}" for warning in report.warnings)
    return "\n".join(lines) + "\n"


def format_error(error: StageError, output_format: str = "text") -> str:
    if output_format == "json":
        payload = {
            "error": {
                "stage": error.stage,
                "type": type(error.error).__name__,
                "message": str(error.error),
            }
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    return f"error [{error.stage}]: {error.error}\n"
