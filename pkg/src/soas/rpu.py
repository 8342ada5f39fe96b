"""Free-text request processing.

Turns raw search text into a triple-based query model in four steps:
normalize (`read_request`), tokenize against a lexicon (`tokenize`),
parse into phrases (`parse`), and emit triples (`reconstruct`).

The grammar is deliberately small and deterministic:

    request       := [VERB] object-phrase qualifier*
    object-phrase := ADJ* NOUN+                 (the last NOUN is the head)
    qualifier     := PREP ADJ* (NOUN | QUOTED)+

Determiners are dropped, words missing from the lexicon land in
`unrecognized`, and recognized tokens that fit no open slot are diverted
there too instead of failing the whole request.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import vocab
from .errors import (
    DanglingPreposition,
    EmptyRequest,
    InvalidTriple,
    LexiconError,
    NoDomain,
    NoObjectPhrase,
    UnterminatedQuote,
)
from .model import Term, Triple, TripleStore, iri, lit

VERB = "VERB"
NOUN = "NOUN"
ADJ = "ADJ"
PREP = "PREP"
DET = "DET"
QUOTED = "QUOTED"
UNKNOWN = "UNKNOWN"

PARTS_OF_SPEECH = frozenset({VERB, NOUN, ADJ, PREP, DET})
_CONTENT_PARTS = frozenset({VERB, NOUN, ADJ})

#: Qualifier predicate for each preposition the grammar understands.
PREPOSITION_PREDICATES = {
    "in": vocab.LOCATION,
    "at": vocab.LOCATION,
    "near": vocab.NEAR_LOCATION,
    "with": vocab.FEATURE,
    "of": vocab.TOPIC,
    "for": vocab.TOPIC,
    "by": vocab.TOPIC,
}

_PUNCTUATION = frozenset(".,;:!?()")


# --- lexicon ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class LexiconEntry:
    lexeme: str
    part_of_speech: str
    iri: Term | None = None
    domain: str | None = None

    def __post_init__(self):
        if (
            not self.lexeme
            or any(ch.isspace() for ch in self.lexeme)
            or self.lexeme != self.lexeme.lower()
        ):
            raise LexiconError(
                f"lexeme must be lowercase without whitespace: {self.lexeme!r}"
            )
        if self.part_of_speech not in PARTS_OF_SPEECH:
            raise LexiconError(
                f"unknown part of speech {self.part_of_speech!r} for {self.lexeme!r}"
            )
        if self.part_of_speech in _CONTENT_PARTS:
            if self.iri is None or not self.iri.is_iri:
                raise LexiconError(
                    f"{self.part_of_speech} entry {self.lexeme!r} needs an IRI"
                )
        if self.part_of_speech == PREP and self.lexeme not in PREPOSITION_PREDICATES:
            raise LexiconError(
                f"preposition {self.lexeme!r} has no predicate mapping; "
                f"known prepositions: {', '.join(sorted(PREPOSITION_PREDICATES))}"
            )
        if self.domain is not None and self.part_of_speech != NOUN:
            raise LexiconError(
                f"domain tags only apply to NOUN entries: {self.lexeme!r}"
            )


class Lexicon:
    """Lexeme -> entry map with duplicate detection."""

    __slots__ = ("_entries",)

    def __init__(self, entries: "tuple[LexiconEntry, ...] | list[LexiconEntry]" = ()):
        self._entries: dict[str, LexiconEntry] = {}
        for entry in entries:
            self.add(entry)

    def add(self, entry: LexiconEntry) -> None:
        if entry.lexeme in self._entries:
            raise LexiconError(f"duplicate lexeme {entry.lexeme!r}")
        self._entries[entry.lexeme] = entry

    def lookup(self, lexeme: str) -> LexiconEntry | None:
        return self._entries.get(lexeme)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: e.lexeme))


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a lexicon file: four tab-separated columns per line.

    Columns are lexeme, part of speech, IRI or ``-``, domain or ``-``.
    ``#`` at line start is a comment; blank lines are skipped.
    """
    lexicon = Lexicon()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        if line.startswith("#") or not line.strip():
            continue
        fields = [field.strip() for field in line.split("\t")]
        if len(fields) != 4:
            raise LexiconError(
                f"{path}:{lineno}: expected 4 tab-separated fields, got {len(fields)}"
            )
        if not all(fields):
            raise LexiconError(f"{path}:{lineno}: empty field (use '-' for none)")
        lexeme, part_of_speech, iri_field, domain_field = fields
        try:
            entry = LexiconEntry(
                lexeme,
                part_of_speech,
                None if iri_field == "-" else iri(iri_field),
                None if domain_field == "-" else domain_field,
            )
            lexicon.add(entry)
        except (LexiconError, InvalidTriple) as err:
            raise LexiconError(f"{path}:{lineno}: {err}") from err
    return lexicon


# --- normalization and tokenization ------------------------------------------


def read_request(raw: str) -> str:
    """Normalize raw request text.

    Outside double quotes: lowercase, collapse whitespace runs to single
    spaces.  Inside double quotes everything is preserved verbatim.  The
    result is stripped; an empty result raises EmptyRequest and an unclosed
    quote raises UnterminatedQuote.
    """
    out: list[str] = []
    in_quote = False
    for ch in raw:
        if ch == '"':
            in_quote = not in_quote
            out.append(ch)
        elif in_quote:
            out.append(ch)
        elif ch.isspace():
            if out and out[-1] != " ":
                out.append(" ")
        else:
            out.append(ch.lower())
    if in_quote:
        raise UnterminatedQuote("request text has an unclosed double quote")
    normalized = "".join(out).strip()
    if not normalized:
        raise EmptyRequest("request text is empty after normalization")
    return normalized


@dataclass(frozen=True, slots=True)
class Token:
    """One unit of request text; span is a byte range into the normalized text."""

    lexeme: str
    kind: str
    span: tuple[int, int]


def tokenize(text: str, lexicon: Lexicon) -> list[Token]:
    """Split normalized text into tokens tagged via the lexicon.

    Double-quoted segments become one QUOTED token (lexeme excludes the
    quotes, span includes them).  Punctuation ``.,;:!?()`` separates words
    and is discarded; hyphens stay inside words.  Words missing from the
    lexicon are tagged UNKNOWN.
    """
    tokens: list[Token] = []
    length = len(text)
    pos = 0
    byte = 0
    while pos < length:
        ch = text[pos]
        if ch == '"':
            start_byte = byte
            byte += 1
            pos += 1
            begin = pos
            while pos < length and text[pos] != '"':
                byte += len(text[pos].encode("utf-8"))
                pos += 1
            if pos >= length:
                raise UnterminatedQuote("quoted segment never closes")
            lexeme = text[begin:pos]
            byte += 1
            pos += 1
            tokens.append(Token(lexeme, QUOTED, (start_byte, byte)))
            continue
        if ch.isspace() or ch in _PUNCTUATION:
            byte += len(ch.encode("utf-8"))
            pos += 1
            continue
        start_byte = byte
        begin = pos
        while (
            pos < length
            and text[pos] != '"'
            and not text[pos].isspace()
            and text[pos] not in _PUNCTUATION
        ):
            byte += len(text[pos].encode("utf-8"))
            pos += 1
        lexeme = text[begin:pos]
        entry = lexicon.lookup(lexeme)
        kind = UNKNOWN if entry is None else entry.part_of_speech
        tokens.append(Token(lexeme, kind, (start_byte, byte)))
    return tokens


# --- parsing ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Qualifier:
    preposition: Token
    values: tuple[Token, ...]


@dataclass(frozen=True, slots=True)
class RecognizedContent:
    command: Token | None
    object_phrase: tuple[Token, ...]
    qualifiers: tuple[Qualifier, ...]
    unrecognized: tuple[Token, ...]

    @property
    def head_noun(self) -> Token:
        return self.object_phrase[-1]


def parse(tokens: list[Token]) -> RecognizedContent:
    """Assemble tokens into command, object phrase, and qualifiers.

    A VERB counts as the command only as the first grammar-visible token
    (determiners and unknown words don't block it).  Tokens that fit no
    open slot are diverted to `unrecognized`; a request with no noun in the
    object phrase raises NoObjectPhrase, and a qualifier preposition that
    never receives a NOUN or QUOTED value raises DanglingPreposition.
    """
    command: Token | None = None
    phrase: list[Token] = []
    phrase_has_noun = False
    qualifiers: list[Qualifier] = []
    unrecognized: list[Token] = []
    open_prep: Token | None = None
    open_values: list[Token] = []
    open_has_value = False
    seen_grammar_token = False

    def close_qualifier() -> None:
        nonlocal open_prep, open_values, open_has_value
        if not open_has_value:
            raise DanglingPreposition(
                f"preposition {open_prep.lexeme!r} has no noun or quoted value"
            )
        qualifiers.append(Qualifier(open_prep, tuple(open_values)))
        open_prep = None
        open_values = []
        open_has_value = False

    for token in tokens:
        kind = token.kind
        if kind == DET:
            continue
        if kind == UNKNOWN:
            unrecognized.append(token)
            continue
        first = not seen_grammar_token
        seen_grammar_token = True
        if first and kind == VERB:
            command = token
            continue
        if open_prep is not None:
            if kind in (NOUN, QUOTED):
                open_values.append(token)
                open_has_value = True
            elif kind == ADJ and not open_has_value:
                open_values.append(token)
            elif kind == PREP:
                close_qualifier()
                open_prep = token
            else:
                unrecognized.append(token)
            continue
        if kind == NOUN:
            phrase.append(token)
            phrase_has_noun = True
        elif kind == ADJ and not phrase_has_noun:
            phrase.append(token)
        elif kind == PREP and phrase_has_noun:
            open_prep = token
        else:
            unrecognized.append(token)

    if open_prep is not None:
        close_qualifier()
    if not phrase_has_noun:
        raise NoObjectPhrase("no recognized noun to search for")
    return RecognizedContent(
        command=command,
        object_phrase=tuple(phrase),
        qualifiers=tuple(qualifiers),
        unrecognized=tuple(unrecognized),
    )


# --- reconstruction -----------------------------------------------------------


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a_64(data: bytes) -> int:
    digest = _FNV_OFFSET
    for value in data:
        digest ^= value
        digest = (digest * _FNV_PRIME) & _U64
    return digest


def request_iri_for(normalized_text: str) -> Term:
    """Stable request identity: same normalized text, same IRI."""
    digest = _fnv1a_64(normalized_text.encode("utf-8"))
    return iri(f"{vocab.REQUEST_PREFIX}{digest:016x}")


@dataclass(frozen=True)
class QueryModel:
    request_iri: Term
    triples: TripleStore
    domain: str
    source_text: str


def reconstruct(
    content: RecognizedContent,
    lexicon: Lexicon,
    raw_text: str,
    normalized_text: str,
) -> QueryModel:
    """Emit the query model's triples from parsed content.

    One triple per object-phrase attribute and one per qualifier, whose
    object is the qualifier's head value (the last NOUN or QUOTED token)
    under the preposition's predicate.  QUOTED values become literals,
    everything else uses the lexicon entry's IRI.
    """

    def entry_iri(token: Token) -> Term:
        entry = lexicon.lookup(token.lexeme)
        if entry is None or entry.iri is None:
            raise LexiconError(f"token {token.lexeme!r} has no lexicon IRI")
        return entry.iri

    head = content.head_noun
    head_entry = lexicon.lookup(head.lexeme)
    if head_entry is None or head_entry.iri is None:
        raise LexiconError(f"token {head.lexeme!r} has no lexicon IRI")
    if head_entry.domain is None:
        raise NoDomain(f"target {head.lexeme!r} carries no domain tag")

    request = request_iri_for(normalized_text)
    triples = TripleStore()
    triples.add(Triple(request, iri(vocab.RDF_TYPE), iri(vocab.REQUEST_CLASS)))
    if content.command is not None:
        triples.add(Triple(request, iri(vocab.ACTION), entry_iri(content.command)))
    triples.add(Triple(request, iri(vocab.TARGET), head_entry.iri))
    for token in content.object_phrase[:-1]:
        triples.add(Triple(request, iri(vocab.ATTRIBUTE), entry_iri(token)))
    for qualifier in content.qualifiers:
        predicate = iri(PREPOSITION_PREDICATES[qualifier.preposition.lexeme])
        value = qualifier.values[-1]  # ADJ* prefix modifies, only the head binds
        obj = lit(value.lexeme) if value.kind == QUOTED else entry_iri(value)
        triples.add(Triple(request, predicate, obj))
    return QueryModel(
        request_iri=request,
        triples=triples,
        domain=head_entry.domain,
        source_text=raw_text,
    )
