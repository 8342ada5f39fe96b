"""Triple model: terms, triples, patterns, and an in-memory store.

Triples serialize one per line as

    <subject-iri> <predicate-iri> <object-iri-or-"literal"> .

Literals know exactly two escapes, ``\\"`` and ``\\\\``.  Lines whose first
character is ``#`` are comments; blank lines are skipped.  Parsing is
whitespace-tolerant between terms, and serialization is canonical (single
spaces, sorted order), so serialize -> parse round-trips every valid triple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Union

from .errors import InvalidTriple, TripleSyntaxError

IRI = "iri"
LITERAL = "lit"

_WS = (" ", "\t")
_VAR_NAME = re.compile(r"[a-z][a-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Term:
    """One node: an IRI or a string literal."""

    kind: str
    value: str

    def __post_init__(self):
        if self.kind == IRI:
            if not self.value or any(ch.isspace() for ch in self.value):
                raise InvalidTriple(
                    f"an IRI must be a non-empty string without whitespace: {self.value!r}"
                )
            if "<" in self.value or ">" in self.value:
                # The file format delimits IRIs with angle brackets and has no
                # IRI escaping, so bracket characters could never round-trip.
                raise InvalidTriple(
                    f"an IRI must not contain angle brackets: {self.value!r}"
                )
        elif self.kind == LITERAL:
            if "\n" in self.value or "\r" in self.value:
                raise InvalidTriple("a literal must not contain line breaks")
        else:
            raise InvalidTriple(f"unknown term kind: {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI


def iri(value: str) -> Term:
    return Term(IRI, value)


def lit(value: str) -> Term:
    return Term(LITERAL, value)


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if not self.subject.is_iri:
            raise InvalidTriple(f"subject must be an IRI, got literal {self.subject.value!r}")
        if not self.predicate.is_iri:
            raise InvalidTriple(f"predicate must be an IRI, got literal {self.predicate.value!r}")

    @property
    def sort_key(self) -> tuple[str, str, str, str]:
        """Canonical order: subject, predicate, object value, object kind."""
        return (self.subject.value, self.predicate.value, self.object.value, self.object.kind)


@dataclass(frozen=True, slots=True)
class Var:
    """A named hole in a pattern; matches any term, consistently per name."""

    name: str

    def __post_init__(self):
        if not _VAR_NAME.match(self.name):
            raise ValueError(f"variable name must match [a-z][a-z0-9_]*: {self.name!r}")


Position = Union[Term, Var]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: Position
    predicate: Position
    object: Position

    def __post_init__(self):
        for slot in ("subject", "predicate"):
            term = getattr(self, slot)
            if isinstance(term, Term) and not term.is_iri:
                raise InvalidTriple(f"pattern {slot} must be an IRI or a variable")

    def substitute(self, binding: dict[str, Term]) -> "TriplePattern":
        """Replace every variable bound in `binding`; unbound variables stay."""

        def fill(position: Position) -> Position:
            if isinstance(position, Var) and position.name in binding:
                return binding[position.name]
            return position

        return TriplePattern(fill(self.subject), fill(self.predicate), fill(self.object))


def _bind(pattern: TriplePattern, triple: Triple) -> dict[str, Term] | None:
    binding: dict[str, Term] = {}
    pairs = (
        (pattern.subject, triple.subject),
        (pattern.predicate, triple.predicate),
        (pattern.object, triple.object),
    )
    for want, got in pairs:
        if isinstance(want, Var):
            seen = binding.get(want.name)
            if seen is None:
                binding[want.name] = got
            elif seen != got:
                return None
        elif want != got:
            return None
    return binding


_EMPTY: frozenset[Triple] = frozenset()


class TripleStore:
    """Duplicate-free collection of triples with deterministic iteration.

    Adds keep per-position indexes so `match` can scan only the smallest
    candidate set for patterns with at least one concrete position.
    """

    __slots__ = ("_triples", "_by_subject", "_by_predicate", "_by_object", "_sorted")

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._by_subject: dict[str, set[Triple]] = {}
        self._by_predicate: dict[str, set[Triple]] = {}
        self._by_object: dict[Term, set[Triple]] = {}
        self._sorted: list[Triple] | None = None
        for triple in triples:
            self.add(triple)

    def add(self, triple: Triple) -> None:
        if not isinstance(triple, Triple):
            raise InvalidTriple(f"expected a Triple, got {type(triple).__name__}")
        if triple in self._triples:
            return
        self._triples.add(triple)
        self._by_subject.setdefault(triple.subject.value, set()).add(triple)
        self._by_predicate.setdefault(triple.predicate.value, set()).add(triple)
        self._by_object.setdefault(triple.object, set()).add(triple)
        self._sorted = None

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.sorted_triples())

    def sorted_triples(self) -> list[Triple]:
        if self._sorted is None:
            self._sorted = sorted(self._triples, key=lambda t: t.sort_key)
        return self._sorted

    def match(self, pattern: TriplePattern) -> list[dict[str, Term]]:
        """All bindings for `pattern`, ordered by the matched triple's sort key.

        A concrete position must equal the triple's term; a repeated variable
        must bind the same term at every occurrence.
        """
        matches: list[tuple[tuple[str, str, str, str], dict[str, Term]]] = []
        for triple in self._candidates(pattern):
            binding = _bind(pattern, triple)
            if binding is not None:
                matches.append((triple.sort_key, binding))
        matches.sort(key=lambda entry: entry[0])
        return [binding for _, binding in matches]

    def _candidates(self, pattern: TriplePattern) -> Iterable[Triple]:
        narrowed: list[set[Triple] | frozenset[Triple]] = []
        if isinstance(pattern.subject, Term):
            narrowed.append(self._by_subject.get(pattern.subject.value, _EMPTY))
        if isinstance(pattern.predicate, Term):
            narrowed.append(self._by_predicate.get(pattern.predicate.value, _EMPTY))
        if isinstance(pattern.object, Term):
            narrowed.append(self._by_object.get(pattern.object, _EMPTY))
        if not narrowed:
            return self._triples
        return min(narrowed, key=len)


# --- line format -----------------------------------------------------------


class _Scanner:
    __slots__ = ("line", "pos")

    def __init__(self, line: str):
        self.line = line
        self.pos = 0

    @property
    def column(self) -> int:
        return self.pos + 1

    def fail(self, message: str, column: int | None = None):
        raise TripleSyntaxError(message, self.column if column is None else column)

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def peek(self) -> str:
        return "" if self.at_end() else self.line[self.pos]

    def skip_ws(self) -> None:
        while self.peek() in _WS:
            self.pos += 1

    def require_ws(self, slot: str) -> None:
        if self.peek() not in _WS:
            self.fail(f"expected whitespace before the {slot}")
        self.skip_ws()

    def read_iri(self, slot: str) -> Term:
        if self.peek() != "<":
            self.fail(f"expected '<' to open the {slot}")
        self.pos += 1
        start = self.pos
        while True:
            ch = self.peek()
            if ch == "":
                self.fail(f"unterminated {slot}: missing '>'")
            if ch == ">":
                break
            if ch.isspace():
                self.fail(f"whitespace inside the {slot}")
            self.pos += 1
        value = self.line[start : self.pos]
        if not value:
            self.fail(f"empty {slot}", column=start + 1)
        self.pos += 1
        return Term(IRI, value)

    def read_literal(self) -> Term:
        self.pos += 1  # opening quote
        out: list[str] = []
        while True:
            ch = self.peek()
            if ch == "":
                self.fail("unterminated literal: missing closing '\"'")
            if ch == "\\":
                escape_col = self.column
                self.pos += 1
                nxt = self.peek()
                if nxt not in ('"', "\\"):
                    self.fail(f"unsupported escape '\\{nxt}'", column=escape_col)
                out.append(nxt)
                self.pos += 1
                continue
            if ch == '"':
                self.pos += 1
                return Term(LITERAL, "".join(out))
            out.append(ch)
            self.pos += 1

    def read_object(self) -> Term:
        ch = self.peek()
        if ch == "<":
            return self.read_iri("object")
        if ch == '"':
            return self.read_literal()
        self.fail("expected '<' or '\"' to open the object")
        raise AssertionError("unreachable")

    def expect_dot(self) -> None:
        if self.peek() != ".":
            self.fail("expected '.' to close the triple")
        self.pos += 1

    def expect_end(self) -> None:
        if not self.at_end():
            self.fail("unexpected content after the closing '.'")


def parse_triple_line(line: str) -> Triple:
    """Parse one serialized triple; errors carry the 1-based failure column."""
    scan = _Scanner(line)
    scan.skip_ws()
    subject = scan.read_iri("subject")
    scan.require_ws("predicate")
    predicate = scan.read_iri("predicate")
    scan.require_ws("object")
    obj = scan.read_object()
    scan.skip_ws()
    scan.expect_dot()
    scan.skip_ws()
    scan.expect_end()
    return Triple(subject, predicate, obj)


def _escape_literal(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def serialize_term(term: Term) -> str:
    if term.is_iri:
        return f"<{term.value}>"
    return f'"{_escape_literal(term.value)}"'


def serialize_triple(triple: Triple) -> str:
    return (
        f"{serialize_term(triple.subject)} "
        f"{serialize_term(triple.predicate)} "
        f"{serialize_term(triple.object)} ."
    )


def dumps_triples(store: TripleStore) -> str:
    return "".join(serialize_triple(t) + "\n" for t in store.sorted_triples())


def load_triples(path: str | Path) -> TripleStore:
    """Read a triple file; syntax errors are prefixed with path and line number."""
    store = TripleStore()
    text = Path(path).read_text(encoding="utf-8")
    # Lines are delimited by "\n" alone (plus CRLF tolerance) — literals may
    # contain any other control character, and splitlines() would cut them.
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        if line.startswith("#") or not line.strip():
            continue
        try:
            store.add(parse_triple_line(line))
        except TripleSyntaxError as err:
            raise TripleSyntaxError(f"{path}:{lineno}: {err}", err.column) from err
    return store


def save_triples(store: TripleStore, path: str | Path) -> None:
    Path(path).write_text(dumps_triples(store), encoding="utf-8")
