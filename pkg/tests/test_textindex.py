import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modindex.storyboard import flatten_storyboard
from modindex.textindex import (
    And,
    Document,
    Hit,
    IndexFormatError,
    InvertedIndex,
    Not,
    Or,
    QuerySyntaxError,
    Term,
    build_index,
    format_query,
    load_index,
    parse_query,
    positive_terms,
    query_index,
    run_benchmark,
    save_index,
    scan_query,
    synthetic_corpus,
    tokenize,
)

VOCAB = ["ohm", "shock", "video", "ec", "law", "current", "amp", "volt"]


class TestTokenize:
    @pytest.mark.parametrize(
        "text, tokens",
        [
            ("Ohm's Law: I = V/R", ["ohm", "s", "law", "i", "v", "r"]),
            ("", []),
            ("Amperes = Coulombs / second", ["amperes", "coulombs", "second"]),
            ("histogram_dominant_bin_0", ["histogram_dominant_bin_0"]),
            ("AC & DC", ["ac", "dc"]),
        ],
    )
    def test_examples(self, text, tokens):
        assert tokenize(text) == tokens


class TestParser:
    def test_examples(self):
        assert parse_query("shock") == Term("shock")
        assert parse_query("electric AND current") == And(Term("electric"), Term("current"))
        assert parse_query("ohm OR ampere NOT shock") == Or(
            Term("ohm"), And(Term("ampere"), Not(Term("shock")))
        )

    def test_precedence(self):
        assert parse_query("a b OR c") == Or(And(Term("a"), Term("b")), Term("c"))
        assert parse_query("a AND (b OR c)") == And(Term("a"), Or(Term("b"), Term("c")))
        assert parse_query("NOT a b") == And(Not(Term("a")), Term("b"))
        assert parse_query("a or b and c") == Or(Term("a"), And(Term("b"), Term("c")))

    def test_word_splits_into_and(self):
        assert parse_query("ohm's") == And(Term("ohm"), Term("s"))
        assert parse_query("V/R") == And(Term("v"), Term("r"))

    @pytest.mark.parametrize(
        "text",
        ["", "   ", "NOT shock", "(a", "a)", "a AND", "OR a", "a AND OR b", "()", "NOT (a OR b)", "---", "a NOT"],
    )
    def test_errors(self, text):
        with pytest.raises(QuerySyntaxError):
            parse_query(text)

    @given(st.recursive(
        st.sampled_from(VOCAB).map(Term),
        lambda kids: st.one_of(
            st.tuples(kids, kids).map(lambda p: And(*p)),
            st.tuples(kids, kids).map(lambda p: Or(*p)),
            kids.map(Not),
        ),
        max_leaves=8,
    ))
    def test_format_round_trip(self, node):
        if not positive_terms(node):
            with pytest.raises(QuerySyntaxError):
                parse_query(format_query(node))
        else:
            assert parse_query(format_query(node)) == node


@pytest.fixture
def lesson_docs(lesson):
    return flatten_storyboard(lesson)


def grep_ids(docs, word):
    """Independent oracle: ids whose text contains ``word`` as a whole word."""
    import re

    return {d.id for d in docs if re.search(rf"(?i)(?<![a-z0-9_]){word}(?![a-z0-9_])", d.text)}


class TestIndex:
    def test_small(self):
        idx = build_index([Document("x", "a a b")])
        assert idx.postings("a") == [("x", 2)]
        assert idx.postings("b") == [("x", 1)]
        assert idx.total_terms == 3
        assert idx.doc_count == 1

    def test_empty(self):
        idx = build_index([])
        assert idx.doc_count == 0 and idx.terms == {} and idx.total_terms == 0

    def test_duplicate_id(self):
        with pytest.raises(IndexFormatError):
            build_index([Document("a", "x"), Document("a", "y")])

    def test_shock_postings(self, lesson_docs):
        idx = build_index(lesson_docs)
        ids = {d for d, _ in idx.postings("shock")}
        assert ids == grep_ids(lesson_docs, "shock") == {"B1,B2", "B1,B2,B3", "B1,B2,M3"}

    @pytest.mark.parametrize(
        "query, expected",
        [
            ("ohm", {"E1", "E1,M2"}),
            ("zzz", set()),
            ("shock AND video", {"B1,B2,B3"}),
            ("coulombs", {"M1,B2", "M1,M2"}),
        ],
    )
    def test_lesson_queries(self, lesson_docs, query, expected):
        idx = build_index(lesson_docs)
        hits = query_index(idx, parse_query(query))
        assert {h.doc_id for h in hits} == expected
        assert hits == scan_query(lesson_docs, parse_query(query))

    def test_ohm_oracle(self, lesson_docs):
        assert grep_ids(lesson_docs, "ohm") == {"E1", "E1,M2"}

    def test_scoring_and_order(self):
        docs = [Document("b", "x x y"), Document("a", "x y"), Document("c", "y y y")]
        idx = build_index(docs)
        assert query_index(idx, parse_query("x OR y")) == [
            Hit("b", 3), Hit("c", 3), Hit("a", 2)
        ]
        assert query_index(idx, parse_query("y NOT x")) == [Hit("c", 3)]

    def test_scan_empty_corpus(self):
        assert scan_query([], parse_query("a")) == []

    def test_tf_conservation(self, lesson_docs):
        idx = build_index(lesson_docs)
        assert idx.total_terms == sum(len(tokenize(d.text)) for d in lesson_docs)
        assert idx.total_terms == sum(tf for p in idx.terms.values() for tf in p.values())


def random_corpus(rng: random.Random, n: int) -> list[Document]:
    return [
        Document(f"d{i}", " ".join(rng.choice(VOCAB) for _ in range(rng.randint(0, 8))))
        for i in range(n)
    ]


queries = st.recursive(
    st.sampled_from(VOCAB).map(Term),
    lambda kids: st.one_of(
        st.tuples(kids, kids).map(lambda p: And(*p)),
        st.tuples(kids, kids).map(lambda p: Or(*p)),
        kids.map(Not),
    ),
    max_leaves=6,
).filter(lambda q: bool(positive_terms(q)))


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32), st.integers(0, 60), queries)
    def test_oracle_equivalence(self, seed, n, q):
        docs = random_corpus(random.Random(seed), n)
        assert query_index(build_index(docs), q) == scan_query(docs, q)

    @given(st.integers(0, 2**32))
    def test_de_morgan(self, seed):
        docs = random_corpus(random.Random(seed), 40)
        idx = build_index(docs)
        a, b, c = random.Random(seed).sample(VOCAB, 3)
        left = {h.doc_id for h in query_index(idx, parse_query(f"NOT ({a} OR {b}) AND {c}"))}
        right = {h.doc_id for h in query_index(idx, parse_query(f"{c} NOT {a} NOT {b}"))}
        assert left == right

    @given(st.integers(0, 2**32), st.integers(1, 30))
    def test_monotone(self, seed, n):
        docs = random_corpus(random.Random(seed), n)
        before = build_index(docs[:-1])
        after = build_index(docs)
        for term, plist in before.terms.items():
            for d, tf in plist.items():
                assert after.terms[term][d] == tf

    @given(st.integers(0, 2**32))
    def test_determinism(self, seed):
        docs = random_corpus(random.Random(seed), 30)
        assert build_index(docs).dumps() == build_index(list(docs)).dumps()

    @given(st.integers(0, 2**32))
    def test_invariants(self, seed):
        docs = random_corpus(random.Random(seed), 30)
        idx = build_index(docs)
        assert list(idx.terms) == sorted(idx.terms)
        for plist in idx.terms.values():
            assert list(plist) == sorted(plist)
            assert all(tf >= 1 for tf in plist.values())


class TestSerialization:
    def test_round_trip(self, lesson_docs, tmp_path):
        idx = build_index(lesson_docs)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_index(idx, p1)
        loaded = load_index(p1)
        assert loaded == idx
        save_index(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_format(self):
        idx = build_index([Document("y", "b a"), Document("x", "a")])
        assert idx.dumps() == (
            '{"doc_count":2,"total_terms":3,"terms":{"a":[["x",1],["y",1]],"b":[["y",1]]}}\n'
        )

    def test_truncated(self, lesson_docs, tmp_path):
        p = tmp_path / "a.json"
        save_index(build_index(lesson_docs), p)
        p.write_bytes(p.read_bytes()[:-20])
        with pytest.raises(IndexFormatError):
            load_index(p)

    @pytest.mark.parametrize(
        "data",
        [
            {"doc_count": 1, "terms": {}},
            {"doc_count": 1, "total_terms": 2, "terms": {"a": [["x", 1]]}},
            {"doc_count": 1, "total_terms": 0, "terms": {"a": [["x", 0]]}},
            {"doc_count": 1, "total_terms": 2, "terms": {"a": [["x", 1], ["x", 1]]}},
        ],
    )
    def test_bad_content(self, data):
        with pytest.raises(IndexFormatError):
            InvertedIndex.from_dict(data)


class TestBenchmark:
    def test_corpus_is_deterministic(self):
        a = synthetic_corpus(100, 50, seed=3)
        assert a == synthetic_corpus(100, 50, seed=3)
        assert a != synthetic_corpus(100, 50, seed=4)
        assert all(5 <= len(d.text.split()) <= 50 for d in a)

    def test_tiny_run_fails_huge_threshold(self):
        report = run_benchmark(1, 2, 1, seed=0, threshold=1e9)
        assert report.results_equal
        assert report.success is False
        assert report.speedup == pytest.approx(report.scan_time_total / report.indexed_time_total)

    def test_small_run(self):
        report = run_benchmark(2000, 500, 20, seed=1, threshold=1.0)
        assert report.corpus_size == 2000 and report.query_count == 20
        assert report.results_equal

    def test_bad_args(self):
        with pytest.raises(ValueError):
            run_benchmark(0, 10, 1, seed=0)
