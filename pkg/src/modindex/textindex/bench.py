"""Scan-versus-index query benchmark on a seeded synthetic corpus."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass

from modindex.textindex.index import Document, build_index, query_index, scan_query
from modindex.textindex.query import And, Node, Not, Or, Term

DEFAULT_THRESHOLD = 10.0


class BenchmarkMismatch(RuntimeError):
    """Scan and index disagreed on a query; the implementation is broken."""


@dataclass
class BenchReport:
    corpus_size: int
    vocab_size: int
    query_count: int
    seed: int
    threshold: float
    index_build_time: float
    scan_time_total: float
    indexed_time_total: float
    scan_time_mean: float
    indexed_time_mean: float
    speedup: float
    results_equal: bool
    success: bool

    def to_dict(self) -> dict:
        return asdict(self)


def vocabulary(vocab_size: int) -> list[str]:
    width = len(str(vocab_size - 1))
    return [f"w{i:0{width}d}" for i in range(vocab_size)]


def synthetic_corpus(doc_count: int, vocab_size: int, seed: int) -> list[Document]:
    """Documents of 5..50 terms drawn with Zipf-like (1/rank) frequencies."""
    rng = random.Random(seed)
    vocab = vocabulary(vocab_size)
    cum = list(itertools.accumulate(1.0 / r for r in range(1, vocab_size + 1)))
    width = len(str(doc_count))
    docs = []
    for i in range(doc_count):
        n = rng.randint(5, 50)
        words = rng.choices(vocab, cum_weights=cum, k=n)
        docs.append(Document(f"d{i:0{width}d}", " ".join(words)))
    return docs


def random_queries(count: int, vocab_size: int, seed: int) -> list[Node]:
    """1-3 term queries; the first term is always positive so every query is valid."""
    rng = random.Random(seed ^ 0x5EED)
    vocab = vocabulary(vocab_size)
    queries = []
    for _ in range(count):
        node: Node = Term(rng.choice(vocab))
        for _ in range(rng.randint(0, 2)):
            other = Term(rng.choice(vocab))
            op = rng.choice(("and", "or", "not"))
            if op == "and":
                node = And(node, other)
            elif op == "or":
                node = Or(node, other)
            else:
                node = And(node, Not(other))
        queries.append(node)
    return queries


def run_benchmark(
    doc_count: int,
    vocab_size: int,
    queries: int,
    seed: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> BenchReport:
    if doc_count < 1 or queries < 1 or vocab_size < 2:
        raise ValueError("need doc_count >= 1, queries >= 1, vocab_size >= 2")
    docs = synthetic_corpus(doc_count, vocab_size, seed)
    qs = random_queries(queries, vocab_size, seed)

    t0 = time.perf_counter()
    index = build_index(docs)
    build_time = time.perf_counter() - t0

    scan_results = []
    t0 = time.perf_counter()
    for q in qs:
        scan_results.append(scan_query(docs, q))
    scan_time = time.perf_counter() - t0

    index_results = []
    t0 = time.perf_counter()
    for q in qs:
        index_results.append(query_index(index, q))
    indexed_time = time.perf_counter() - t0

    for i, (a, b) in enumerate(zip(scan_results, index_results)):
        if a != b:
            raise BenchmarkMismatch(f"query {i}: scan and index results differ")

    # clock resolution floor so a trivially fast index cannot divide by zero
    indexed_time = max(indexed_time, 1e-9)
    speedup = scan_time / indexed_time
    return BenchReport(
        corpus_size=doc_count,
        vocab_size=vocab_size,
        query_count=queries,
        seed=seed,
        threshold=threshold,
        index_build_time=build_time,
        scan_time_total=scan_time,
        indexed_time_total=indexed_time,
        scan_time_mean=scan_time / queries,
        indexed_time_mean=indexed_time / queries,
        speedup=speedup,
        results_equal=True,
        success=speedup > threshold,
    )
