"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 internal invariant violation. Payload goes to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from modindex.catalog import CatalogError, ingest_pipeline, load_catalog
from modindex.detectors import (
    DetectorError,
    FrameError,
    detect_object,
    load_grammar,
    read_pgm,
    tuples_from_tree,
)
from modindex.partition import PartitionError, ast_partition, layout_stats, verify_layout
from modindex.storyboard import StoryboardError, load_storyboard, validate_storyboard
from modindex.textindex import (
    DEFAULT_THRESHOLD,
    BenchmarkMismatch,
    IndexFormatError,
    QuerySyntaxError,
    load_index,
    parse_query,
    query_index,
    run_benchmark,
    save_index,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

DATA_ERRORS = (
    CatalogError,
    DetectorError,
    FrameError,
    IndexFormatError,
    PartitionError,
    QuerySyntaxError,
    StoryboardError,
    OSError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _err(message: str) -> None:
    if os.environ.get("MODINDEX_COLOR") == "1" and sys.stderr.isatty():
        message = f"\033[31m{message}\033[0m"
    print(message, file=sys.stderr)


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def cmd_validate(args) -> int:
    board = load_storyboard(args.storyboard)
    violations = validate_storyboard(board)
    if args.format == "json":
        _emit_json([{"address": v.address, "rule": v.rule} for v in violations])
    for v in violations:
        _err(str(v))
    return EXIT_DATA if violations else EXIT_OK


def cmd_index(args) -> int:
    catalog = load_catalog(args.catalog)
    for w in catalog.warnings:
        _err(f"warning: {w}")
    index = ingest_pipeline(catalog, args.ast)
    save_index(index, args.output)
    if args.format == "json":
        _emit_json({"output": str(args.output), "doc_count": index.doc_count,
                    "total_terms": index.total_terms, "terms": len(index.terms)})
    return EXIT_OK


def cmd_query(args) -> int:
    index = load_index(args.index)
    hits = query_index(index, parse_query(args.query))
    if args.limit is not None:
        hits = hits[: args.limit]
    if args.format == "json":
        _emit_json([{"doc_id": h.doc_id, "score": h.score} for h in hits])
    else:
        for h in hits:
            print(f"{h.doc_id}\t{h.score}")
    return EXIT_OK


def cmd_bench(args) -> int:
    report = run_benchmark(args.docs, args.vocab, args.queries, args.seed, args.threshold)
    _emit_json(report.to_dict())
    return EXIT_OK


def cmd_partition(args) -> int:
    layout = ast_partition(args.n, args.width, args.height)
    coverage = verify_layout(layout)
    if not coverage.covered:
        _err(f"internal error: layout does not cover the frame ({coverage})")
        return EXIT_INTERNAL
    stats = layout_stats(layout)
    if args.format == "json":
        d = layout.to_dict()
        d["stats"] = stats.to_dict()
        _emit_json(d)
    else:
        for t in layout.tiles:
            print(f"{t.tile_class.value} {t.x} {t.y} {t.width} {t.height}")
        counts = " ".join(f"{c.value}={n}" for c, n in stats.class_counts.items())
        print(
            f"# tiles={len(layout.tiles)} min_area={stats.min_area} max_area={stats.max_area}"
            f" mean_area={stats.mean_area:.2f} imbalance={stats.imbalance:.4f}"
            f" worst_aspect={stats.worst_aspect:.4f} {counts}"
        )
    return EXIT_OK


def _parse_meta(items: list[str]) -> dict[str, str]:
    meta = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--meta expects key=value, got {item!r}")
        meta[key] = value
    return meta


def cmd_detect(args) -> int:
    frame = read_pgm(args.frame)
    grammar = load_grammar(args.grammar)
    layout = ast_partition(args.ast, frame.width, frame.height) if args.ast else None
    tree = detect_object(grammar, args.object_id, frame, _parse_meta(args.meta), layout)
    tuples = tuples_from_tree(tree)
    if args.format == "json":
        _emit_json([t.__dict__ for t in tuples])
    else:
        for t in tuples:
            print(f"{t.object_id}\t{t.path}\t{t.attribute}\t{t.value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modindex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name: str, func, help: str, default_format: str = "text"):
        p = sub.add_parser(name, help=help)
        p.add_argument("--format", choices=("text", "json"), default=default_format)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a storyboard JSON file")
    p.add_argument("storyboard", type=Path)

    p = add("index", cmd_index, "ingest a catalog into an index file")
    p.add_argument("catalog", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--ast", type=int, default=None, metavar="N",
                   help="run image detectors per AST tile")

    p = add("query", cmd_query, "run a boolean query against an index file")
    p.add_argument("index", type=Path)
    p.add_argument("query")
    p.add_argument("--limit", type=int, default=None)

    p = add("bench", cmd_bench, "scan vs index benchmark", default_format="json")
    p.add_argument("--docs", type=int, default=50000)
    p.add_argument("--vocab", type=int, default=5000)
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)

    p = add("partition", cmd_partition, "AST partition of a frame")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)

    p = add("detect", cmd_detect, "run a detector grammar over a PGM frame")
    p.add_argument("frame", type=Path)
    p.add_argument("--grammar", type=Path, required=True)
    p.add_argument("--object-id", required=True)
    p.add_argument("--meta", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--ast", type=int, default=None, metavar="N")
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        _err(str(e))
        return EXIT_USAGE
    except BenchmarkMismatch as e:
        _err(f"internal error: {e}")
        return EXIT_INTERNAL
    except PartitionError as e:
        where = f" [{e.symbol}]" if e.symbol else ""
        _err(f"error{where}: {e}")
        return EXIT_DATA
    except DATA_ERRORS as e:
        _err(f"error: {e}")
        return EXIT_DATA


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
