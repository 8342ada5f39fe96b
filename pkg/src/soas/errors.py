"""Exception types shared across the package.

Everything raised on purpose derives from SoasError so callers can catch
one base class at the process boundary.
"""

from __future__ import annotations


class SoasError(Exception):
    """Base class for every deliberate failure in this package."""


# --- triple model ---------------------------------------------------------


class InvalidTriple(SoasError):
    """A term or triple violates the model rules (e.g. literal subject)."""


class TripleSyntaxError(SoasError):
    """A line in a triple file does not parse.

    Carries the 1-based column where parsing stopped.
    """

    def __init__(self, message: str, column: int):
        super().__init__(message)
        self.column = column


# --- request processing ----------------------------------------------------


class EmptyRequest(SoasError):
    """The request text is empty after normalization."""


class UnterminatedQuote(SoasError):
    """A double-quoted segment in the request text never closes."""


class NoObjectPhrase(SoasError):
    """No recognized noun survived parsing, so there is nothing to search for."""


class DanglingPreposition(SoasError):
    """A qualifier preposition has no noun or quoted value after it."""


class NoDomain(SoasError):
    """The head noun's lexicon entry carries no domain tag."""


class LexiconError(SoasError):
    """A lexicon file is malformed or an entry violates the entry rules."""


class KnowledgeBaseInvalid(SoasError):
    """A knowledge base file has no usable items (e.g. an item lacks a title)."""


# --- agent locator ---------------------------------------------------------


class CatalogInvalid(SoasError):
    """A catalog agent is unusable (bad or missing endpoint).

    Carries the IRI of the offending agent.
    """

    def __init__(self, message: str, agent_iri: str):
        super().__init__(message)
        self.agent_iri = agent_iri


class NoAgentsFound(SoasError):
    """The catalog lists no agent for the request's domain."""


# --- agent communication ---------------------------------------------------


class MessageTooLarge(SoasError):
    """An encoded wire line exceeds the protocol's line limit."""


class ProtocolError(SoasError):
    """A wire message is not a valid protocol frame for this exchange."""


class AllAgentsFailed(SoasError):
    """Every contacted agent failed; carries the per-agent outcomes."""

    def __init__(self, message: str, outcomes: list):
        super().__init__(message)
        self.outcomes = outcomes


class JournalError(SoasError):
    """A result-store journal file cannot be replayed."""


# --- ranking -----------------------------------------------------------------


class MixedRequests(SoasError):
    """Scored results from different requests cannot be ranked together."""


# --- agent runtime ---------------------------------------------------------


class BindFailed(SoasError):
    """An agent endpoint cannot be claimed (port or name already in use)."""


# --- pipeline --------------------------------------------------------------


class ConfigError(SoasError):
    """Pipeline configuration is unusable (missing file, bad value)."""


class StageError(SoasError):
    """A pipeline stage failed; wraps the underlying error with the stage name."""

    def __init__(self, stage: str, error: Exception):
        super().__init__(f"{stage}: {error}")
        self.stage = stage
        self.error = error
