"""Weight-based scoring and ordering of stored results.

A record's weight blends how well its triples satisfy the query model's
constraints (match score) with the relevance the agent reported:

    weight = match_coeff * match_score + relevance_coeff * relevance

Default coefficients are 0.7 and 0.3.  Ranking is a total order — weight
descending, then agent IRI, title, and arrival index ascending — so equal
inputs always produce the same listing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import vocab
from .errors import ConfigError, MixedRequests
from .model import Term, Triple
from .results import ResultRecord
from .rpu import QueryModel

MATCH_COEFF = 0.7
RELEVANCE_COEFF = 0.3

_EXCLUDED_PREDICATES = frozenset({vocab.RDF_TYPE, vocab.ACTION, vocab.TARGET})


def constraint_pairs(triples: Iterable[Triple]) -> set[tuple[Term, Term]]:
    """The (predicate, object) pairs that act as match constraints.

    Type declarations, the command, and the target say what is being looked
    for, not what must hold on a result, so they are excluded.
    """
    return {
        (t.predicate, t.object)
        for t in triples
        if t.predicate.value not in _EXCLUDED_PREDICATES
    }


@dataclass(frozen=True, slots=True)
class RankWeights:
    match_coeff: float = MATCH_COEFF
    relevance_coeff: float = RELEVANCE_COEFF

    def __post_init__(self):
        for name in ("match_coeff", "relevance_coeff"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value!r}")
        total = self.match_coeff + self.relevance_coeff
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"rank coefficients must sum to 1.0, got {total!r}")


@dataclass(frozen=True)
class ScoredResult:
    record: ResultRecord
    match_score: float
    weight: float


@dataclass(frozen=True)
class RankedList:
    request_iri: str
    results: tuple[ScoredResult, ...]


def score_item(
    model: QueryModel, record: ResultRecord, weights: RankWeights = RankWeights()
) -> ScoredResult:
    """Score one stored record against the query model.

    The match score is the satisfied fraction of the model's constraint
    pairs; a model without constraints matches everything fully.
    """
    constraints = constraint_pairs(model.triples)
    if constraints:
        present = constraint_pairs(record.triples)
        match_score = len(constraints & present) / len(constraints)
    else:
        match_score = 1.0
    weight = weights.match_coeff * match_score + weights.relevance_coeff * record.relevance
    return ScoredResult(record=record, match_score=match_score, weight=weight)


def rank(scored: Iterable[ScoredResult]) -> RankedList:
    """Order scored results into the final listing (a total order).

    All inputs must belong to one request; empty input ranks to an empty
    listing with an empty request IRI.
    """
    items = list(scored)
    request_iris = {item.record.request_iri for item in items}
    if len(request_iris) > 1:
        raise MixedRequests(
            f"cannot rank results from multiple requests: {sorted(request_iris)}"
        )
    items.sort(
        key=lambda item: (
            -item.weight,
            item.record.agent_iri,
            item.record.title,
            item.record.arrival_index,
        )
    )
    request_iri = items[0].record.request_iri if items else ""
    return RankedList(request_iri=request_iri, results=tuple(items))
