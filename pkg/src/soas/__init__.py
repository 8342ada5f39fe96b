"""Search across domain agents from free-text requests.

The pipeline turns text like ``find cheap hotels in vienna`` into a triple
query model, discovers matching agents in a semantic catalog, queries them
concurrently over a newline-delimited JSON protocol, and ranks everything
that comes back into one weighted listing.
"""

from .errors import SoasError
from .model import Term, Triple, TriplePattern, TripleStore, Var, iri, lit
from .pipeline import FinalReport, Pipeline, PipelineConfig, format_report, handle_request
from .ranking import RankWeights, rank, score_item
from .rpu import Lexicon, QueryModel, load_lexicon, parse, read_request, reconstruct, tokenize

__version__ = "0.1.0"

__all__ = [
    "FinalReport",
    "Lexicon",
    "Pipeline",
    "PipelineConfig",
    "QueryModel",
    "RankWeights",
    "SoasError",
    "Term",
    "Triple",
    "TriplePattern",
    "TripleStore",
    "Var",
    "__version__",
    "format_report",
    "handle_request",
    "iri",
    "lit",
    "load_lexicon",
    "parse",
    "rank",
    "read_request",
    "reconstruct",
    "score_item",
    "tokenize",
]
