"""Inverted index, boolean queries, and the scan-vs-index benchmark."""

from modindex.textindex.bench import (
    DEFAULT_THRESHOLD,
    BenchmarkMismatch,
    BenchReport,
    random_queries,
    run_benchmark,
    synthetic_corpus,
)
from modindex.textindex.index import (
    Document,
    Hit,
    IndexFormatError,
    InvertedIndex,
    build_index,
    load_index,
    query_index,
    save_index,
    scan_query,
)
from modindex.textindex.query import (
    And,
    Node,
    Not,
    Or,
    QuerySyntaxError,
    Term,
    format_query,
    parse_query,
    positive_terms,
    tokenize,
)

__all__ = [
    "And", "BenchReport", "BenchmarkMismatch", "DEFAULT_THRESHOLD", "Document",
    "Hit", "IndexFormatError", "InvertedIndex", "Node", "Not", "Or",
    "QuerySyntaxError", "Term", "build_index", "format_query", "load_index",
    "parse_query", "positive_terms", "query_index", "random_queries",
    "run_benchmark", "save_index", "scan_query", "synthetic_corpus", "tokenize",
]
