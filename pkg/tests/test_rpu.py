"""Request processing: normalization, tokenization, parsing, reconstruction."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soas import vocab
from soas.errors import (
    DanglingPreposition,
    EmptyRequest,
    LexiconError,
    NoDomain,
    NoObjectPhrase,
    UnterminatedQuote,
)
from soas.model import Triple, iri, lit
from soas.rpu import (
    ADJ,
    DET,
    NOUN,
    PREP,
    QUOTED,
    UNKNOWN,
    VERB,
    Lexicon,
    LexiconEntry,
    load_lexicon,
    parse,
    read_request,
    reconstruct,
    request_iri_for,
    tokenize,
)

GOLDEN_TEXT = "find cheap hotels in vienna"
GOLDEN_IRI = "urn:soas:request:9785ccd17f938c4a"


def analyze(text: str, lexicon):
    """Run the full front half of the pipeline on raw text."""
    normalized = read_request(text)
    content = parse(tokenize(normalized, lexicon))
    return reconstruct(content, lexicon, text, normalized), content


# --- read_request -------------------------------------------------------------


class TestReadRequest:
    def test_trim_collapse_lowercase(self):
        assert read_request("  Find   Cheap hotels in Vienna ") == GOLDEN_TEXT

    def test_quoted_segments_kept_verbatim(self):
        assert read_request('find "Grand Hotel"') == 'find "Grand Hotel"'

    def test_blank_input_is_empty(self):
        with pytest.raises(EmptyRequest):
            read_request("   ")

    def test_unclosed_quote(self):
        with pytest.raises(UnterminatedQuote):
            read_request('find "grand hotel')

    def test_whitespace_inside_quotes_preserved(self):
        assert read_request('find "A  B"') == 'find "A  B"'

    def test_idempotent_on_normalized_text(self):
        text = read_request("  MIXED   case  input ")
        assert read_request(text) == text


# --- tokenize --------------------------------------------------------------------


class TestTokenize:
    def test_golden_request_kinds_and_spans(self, lexicon):
        tokens = tokenize(GOLDEN_TEXT, lexicon)
        assert [(t.lexeme, t.kind, t.span) for t in tokens] == [
            ("find", VERB, (0, 4)),
            ("cheap", ADJ, (5, 10)),
            ("hotels", NOUN, (11, 17)),
            ("in", PREP, (18, 20)),
            ("vienna", NOUN, (21, 27)),
        ]

    def test_quoted_segment_is_one_token(self, lexicon):
        tokens = tokenize('find "grand hotel" in vienna', lexicon)
        assert [(t.lexeme, t.kind) for t in tokens] == [
            ("find", VERB),
            ("grand hotel", QUOTED),
            ("in", PREP),
            ("vienna", NOUN),
        ]
        # The span covers the quotes even though the lexeme excludes them.
        assert tokens[1].span == (5, 18)

    def test_unknown_word(self, lexicon):
        tokens = tokenize("find xyzzy hotels", lexicon)
        assert [(t.lexeme, t.kind) for t in tokens] == [
            ("find", VERB),
            ("xyzzy", UNKNOWN),
            ("hotels", NOUN),
        ]

    def test_punctuation_separates_and_disappears(self, lexicon):
        tokens = tokenize("find hotels, in vienna.", lexicon)
        assert [t.lexeme for t in tokens] == ["find", "hotels", "in", "vienna"]

    def test_hyphens_stay_inside_words(self, lexicon):
        tokens = tokenize("top-rated hotels", lexicon)
        assert [(t.lexeme, t.kind) for t in tokens] == [
            ("top-rated", UNKNOWN),
            ("hotels", NOUN),
        ]

    def test_spans_are_byte_offsets(self, lexicon):
        # "café" is 5 bytes in UTF-8; spans must account for that.
        tokens = tokenize("café hotels", lexicon)
        assert tokens[0].span == (0, 5)
        assert tokens[1].span == (6, 12)

    def test_spans_non_overlapping_and_increasing(self, lexicon):
        tokens = tokenize('find cheap "grand hotel" in vienna now', lexicon)
        spans = [t.span for t in tokens]
        assert all(start < end for start, end in spans)
        assert all(prev[1] <= cur[0] for prev, cur in zip(spans, spans[1:]))
        assert spans[-1][1] <= len('find cheap "grand hotel" in vienna now'.encode())

    def test_unterminated_quote(self, lexicon):
        with pytest.raises(UnterminatedQuote):
            tokenize('find "grand', lexicon)


# --- parse -----------------------------------------------------------------------


class TestParse:
    def test_golden_request(self, lexicon):
        content = parse(tokenize(GOLDEN_TEXT, lexicon))
        assert content.command.lexeme == "find"
        assert [t.lexeme for t in content.object_phrase] == ["cheap", "hotels"]
        assert [
            (q.preposition.lexeme, [v.lexeme for v in q.values])
            for q in content.qualifiers
        ] == [("in", ["vienna"])]
        assert content.unrecognized == ()
        assert content.head_noun.lexeme == "hotels"

    def test_unknown_words_filtered_not_fatal(self, lexicon):
        content = parse(tokenize("find xyzzy hotels", lexicon))
        assert content.command.lexeme == "find"
        assert [t.lexeme for t in content.object_phrase] == ["hotels"]
        assert [t.lexeme for t in content.unrecognized] == ["xyzzy"]

    def test_lone_preposition_has_no_object_phrase(self, lexicon):
        with pytest.raises(NoObjectPhrase):
            parse(tokenize("in", lexicon))

    def test_determiners_dropped_silently(self, lexicon):
        content = parse(tokenize("find the hotels", lexicon))
        assert [t.lexeme for t in content.object_phrase] == ["hotels"]
        assert content.unrecognized == ()

    def test_dangling_preposition_at_end(self, lexicon):
        with pytest.raises(DanglingPreposition):
            parse(tokenize("find hotels in", lexicon))

    def test_dangling_preposition_before_next_preposition(self, lexicon):
        with pytest.raises(DanglingPreposition):
            parse(tokenize("find hotels in with pool", lexicon))

    def test_verb_is_command_only_up_front(self, lexicon):
        content = parse(tokenize("hotels find", lexicon))
        assert content.command is None
        assert [t.lexeme for t in content.unrecognized] == ["find"]

    def test_unknown_words_do_not_block_the_command(self, lexicon):
        content = parse(tokenize("xyzzy find hotels", lexicon))
        assert content.command.lexeme == "find"

    def test_adjective_after_noun_is_diverted(self, lexicon):
        content = parse(tokenize("hotels cheap", lexicon))
        assert [t.lexeme for t in content.object_phrase] == ["hotels"]
        assert [t.lexeme for t in content.unrecognized] == ["cheap"]

    def test_quoted_value_in_qualifier(self, lexicon):
        content = parse(tokenize('find hotels in "old town"', lexicon))
        qualifier = content.qualifiers[0]
        assert qualifier.values[0].kind == QUOTED
        assert qualifier.values[0].lexeme == "old town"

    def test_multiple_qualifiers(self, lexicon):
        content = parse(tokenize("find hotels in vienna with pool", lexicon))
        assert [q.preposition.lexeme for q in content.qualifiers] == ["in", "with"]

    def test_quoted_outside_qualifier_is_diverted(self, lexicon):
        content = parse(tokenize('find hotels "extra"', lexicon))
        assert [t.lexeme for t in content.unrecognized] == ["extra"]

    def test_every_token_is_accounted_for(self, lexicon):
        # DET aside, every token must land in exactly one recognized slot
        # or in unrecognized — nothing silently dropped.
        text = "find the cheap hotels in vienna with xyzzy pool now"
        tokens = tokenize(text, lexicon)
        content = parse(tokens)
        placed = (
            ([content.command] if content.command else [])
            + list(content.object_phrase)
            + [q.preposition for q in content.qualifiers]
            + [v for q in content.qualifiers for v in q.values]
            + list(content.unrecognized)
        )
        dets = [t for t in tokens if t.kind == DET]
        assert sorted(placed, key=lambda t: t.span) == [
            t for t in tokens if t not in dets
        ]


# --- request identity ---------------------------------------------------------------


def fnv1a_64_reference(data: bytes) -> int:
    """Independent FNV-1a: fold per published constants, reduce at the end."""
    value = 14695981039346656037
    for byte in data:
        value = ((value ^ byte) * 1099511628211) % (2**64)
    return value


class TestRequestIri:
    def test_golden_value(self):
        assert request_iri_for(GOLDEN_TEXT).value == GOLDEN_IRI

    @given(st.text(max_size=60))
    def test_matches_reference_implementation(self, text):
        expected = f"urn:soas:request:{fnv1a_64_reference(text.encode()):016x}"
        assert request_iri_for(text).value == expected

    def test_distinct_texts_distinct_iris_over_corpus(self, lexicon):
        corpus = [
            "find hotels",
            "find cheap hotels",
            "find hotels in vienna",
            GOLDEN_TEXT,
            "find flights",
            "find loan",
            "find cheap loan",
            "hotels in vienna",
            "find hotels with pool",
            "find hotels near vienna",
        ]
        iris = {request_iri_for(text).value for text in corpus}
        assert len(iris) == len(corpus)


# --- reconstruct ----------------------------------------------------------------------


class TestReconstruct:
    def test_golden_request_triples(self, lexicon):
        model, _ = analyze(GOLDEN_TEXT, lexicon)
        req = model.request_iri
        assert req.value == GOLDEN_IRI
        assert set(model.triples) == {
            Triple(req, iri(vocab.RDF_TYPE), iri("urn:soas:Request")),
            Triple(req, iri("urn:soas:action"), iri("urn:soas:Find")),
            Triple(req, iri("urn:soas:target"), iri("urn:soas:Hotel")),
            Triple(req, iri("urn:soas:attribute"), iri("urn:soas:PriceLow")),
            Triple(req, iri("urn:soas:location"), iri("urn:soas:place:vienna")),
        }
        assert model.domain == "travel"
        assert model.source_text == GOLDEN_TEXT

    def test_minimal_request_emits_type_and_target_only(self, lexicon):
        model, _ = analyze("hotels", lexicon)
        assert len(model.triples) == 2
        predicates = {t.predicate.value for t in model.triples}
        assert predicates == {vocab.RDF_TYPE, "urn:soas:target"}

    def test_head_noun_without_domain_tag(self, lexicon):
        with pytest.raises(NoDomain):
            analyze("find vienna", lexicon)

    def test_quoted_qualifier_value_becomes_literal(self, lexicon):
        model, _ = analyze('find hotels in "old town"', lexicon)
        locations = [
            t.object for t in model.triples if t.predicate.value == "urn:soas:location"
        ]
        assert locations == [lit("old town")]

    def test_qualifier_with_leading_adjective_binds_the_head_value(self, lexicon):
        model, _ = analyze("find hotels in cheap vienna", lexicon)
        locations = [
            t.object for t in model.triples if t.predicate.value == "urn:soas:location"
        ]
        assert locations == [iri("urn:soas:place:vienna")]

    def test_preposition_map(self, lexicon):
        cases = {
            "in": "urn:soas:location",
            "at": "urn:soas:location",
            "near": "urn:soas:nearLocation",
            "with": "urn:soas:feature",
            "of": "urn:soas:topic",
            "for": "urn:soas:topic",
            "by": "urn:soas:topic",
        }
        for preposition, predicate in cases.items():
            model, _ = analyze(f"find hotels {preposition} vienna", lexicon)
            assert any(t.predicate.value == predicate for t in model.triples), preposition

    def test_identical_text_identical_model(self, lexicon):
        first, _ = analyze(GOLDEN_TEXT, lexicon)
        second, _ = analyze(GOLDEN_TEXT, lexicon)
        assert first.request_iri == second.request_iri
        assert first.triples.sorted_triples() == second.triples.sorted_triples()


# --- triple count law -------------------------------------------------------------


def _law_lexicon() -> Lexicon:
    """A lexicon wide enough to build collision-free random requests."""
    entries = [LexiconEntry("seek", VERB, iri("urn:t:Seek"))]
    entries += [
        LexiconEntry(f"adj{i}", ADJ, iri(f"urn:t:Adj{i}")) for i in range(6)
    ]
    entries += [
        LexiconEntry(f"thing{i}", NOUN, iri(f"urn:t:Thing{i}"), "stuff")
        for i in range(6)
    ]
    entries += [
        LexiconEntry(f"value{i}", NOUN, iri(f"urn:t:Value{i}")) for i in range(8)
    ]
    entries += [LexiconEntry(p, PREP) for p in ("in", "near", "with", "of")]
    entries += [LexiconEntry(d, DET) for d in ("a", "the")]
    return Lexicon(entries)


LAW_LEXICON = _law_lexicon()

# One preposition per predicate so qualifier triples cannot collide.
law_requests = st.builds(
    lambda command, adjs, nouns, quals: (command, adjs, nouns, quals),
    st.booleans(),
    st.lists(st.sampled_from([f"adj{i}" for i in range(6)]), unique=True, max_size=4),
    st.lists(
        st.sampled_from([f"thing{i}" for i in range(6)]),
        unique=True,
        min_size=1,
        max_size=4,
    ),
    st.lists(
        st.tuples(
            st.sampled_from(["in", "near", "with", "of"]),
            st.sampled_from([f"value{i}" for i in range(8)]),
        ),
        unique_by=lambda pair: pair[0],
        max_size=4,
    ),
)


class TestTripleCountLaw:
    @given(law_requests)
    def test_count_law_holds(self, request):
        command, adjs, nouns, qualifiers = request
        words = (["seek"] if command else []) + adjs + nouns
        for preposition, value in qualifiers:
            words += [preposition, value]
        text = " ".join(words)
        normalized = read_request(text)
        content = parse(tokenize(normalized, LAW_LEXICON))
        model = reconstruct(content, LAW_LEXICON, text, normalized)
        attributes = len(adjs) + len(nouns) - 1
        expected = 1 + (1 if command else 0) + 1 + attributes + len(qualifiers)
        assert len(model.triples) == expected


# --- garbage filtering ----------------------------------------------------------------


def strip_subject(model) -> set:
    """The (predicate, object) view of a model — its subject-independent content."""
    return {(t.predicate, t.object) for t in model.triples}


class TestGarbageFiltering:
    def test_unknown_words_never_reach_the_triples(self, lexicon):
        clean, _ = analyze("find cheap hotels in vienna", lexicon)
        noisy, content = analyze("find qwop cheap hotels blarg in vienna zzyx", lexicon)
        assert strip_subject(clean) == strip_subject(noisy)
        assert len(clean.triples) == len(noisy.triples)
        assert [t.lexeme for t in content.unrecognized] == ["qwop", "blarg", "zzyx"]

    def test_randomized_injection(self, lexicon):
        rng = random.Random(0xC0FFEE)
        template = "find cheap hotels in vienna"
        clean, _ = analyze(template, lexicon)
        for _ in range(50):
            words = template.split()
            garbage = [
                "".join(rng.choice("bcdfgjkmqvwxz") for _ in range(7))
                for _ in range(rng.randint(1, 4))
            ]
            for word in garbage:
                words.insert(rng.randint(0, len(words)), word)
            noisy, content = analyze(" ".join(words), lexicon)
            assert strip_subject(noisy) == strip_subject(clean)
            unrecognized = {t.lexeme for t in content.unrecognized}
            assert unrecognized == set(garbage)


# --- lexicon loading ---------------------------------------------------------------


class TestLexiconLoading:
    def test_packaged_lexicon_loads(self, lexicon):
        assert lexicon.lookup("hotels").domain == "travel"
        assert lexicon.lookup("find").part_of_speech == VERB
        assert lexicon.lookup("in").iri is None

    def _load(self, tmp_path, text):
        path = tmp_path / "lexicon.tsv"
        path.write_text(text)
        return load_lexicon(path)

    def test_comments_and_blank_lines(self, tmp_path):
        lexicon = self._load(tmp_path, "# words\n\nhotel\tNOUN\turn:t:Hotel\ttravel\n")
        assert lexicon.lookup("hotel") is not None

    def test_wrong_field_count(self, tmp_path):
        with pytest.raises(LexiconError, match=":1:"):
            self._load(tmp_path, "hotel\tNOUN\turn:t:Hotel\n")

    def test_empty_field(self, tmp_path):
        with pytest.raises(LexiconError, match="empty field"):
            self._load(tmp_path, "hotel\tNOUN\t\ttravel\n")

    def test_duplicate_lexeme(self, tmp_path):
        text = "hotel\tNOUN\turn:t:H\ttravel\nhotel\tNOUN\turn:t:H\ttravel\n"
        with pytest.raises(LexiconError, match="duplicate"):
            self._load(tmp_path, text)

    def test_unknown_part_of_speech(self, tmp_path):
        with pytest.raises(LexiconError):
            self._load(tmp_path, "hotel\tGERUND\turn:t:H\t-\n")

    def test_content_word_needs_iri(self, tmp_path):
        with pytest.raises(LexiconError, match="needs an IRI"):
            self._load(tmp_path, "hotel\tNOUN\t-\ttravel\n")

    def test_unmapped_preposition_rejected(self, tmp_path):
        with pytest.raises(LexiconError, match="no predicate mapping"):
            self._load(tmp_path, "beside\tPREP\t-\t-\n")

    def test_domain_tag_only_on_nouns(self, tmp_path):
        with pytest.raises(LexiconError, match="domain"):
            self._load(tmp_path, "cheap\tADJ\turn:t:Cheap\ttravel\n")

    def test_uppercase_lexeme_rejected(self, tmp_path):
        with pytest.raises(LexiconError, match="lowercase"):
            self._load(tmp_path, "Hotel\tNOUN\turn:t:H\ttravel\n")
