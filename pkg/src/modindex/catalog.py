"""Fragment catalog and the ingest pipeline.

A catalog ties cut-list fragments of source videos to story units and to
the frames sampled from them. Ingesting a catalog turns both the
storyboard and every frame's detector output into documents of one
inverted index.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from modindex.detectors import (
    DetectorError,
    DetectorGrammar,
    FrameError,
    SyntheticFrame,
    detect_object,
    read_pgm,
    tuples_from_tree,
    tuples_to_terms,
)
from modindex.partition import PartitionError, ast_partition
from modindex.storyboard import (
    StoryAddress,
    Storyboard,
    StoryboardError,
    UnitNotFound,
    flatten_storyboard,
    format_address,
    get_unit,
    parse_address,
    storyboard_from_dict,
    storyboard_to_dict,
    validate_storyboard,
)
from modindex.textindex import Document, InvertedIndex, build_index

log = logging.getLogger(__name__)


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class FrameRef:
    width: int
    height: int
    path: str | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        d: dict = {"path": self.path} if self.path is not None else {"seed": self.seed}
        d.update(width=self.width, height=self.height)
        return d

    def load(self, base_dir: Path | None) -> SyntheticFrame:
        if self.seed is not None:
            return SyntheticFrame.from_seed(self.seed, self.width, self.height)
        path = Path(self.path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        frame = read_pgm(path)
        if (frame.width, frame.height) != (self.width, self.height):
            raise FrameError(
                f"{path} is {frame.width}x{frame.height}, catalog says {self.width}x{self.height}"
            )
        return frame


@dataclass(frozen=True)
class FragmentRecord:
    fragment_id: str
    source: str
    start_ms: int
    end_ms: int
    story_address: StoryAddress
    frames: tuple[FrameRef, ...] = ()
    metadata: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "fragment_id": self.fragment_id,
            "source": self.source,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "story_address": format_address(self.story_address),
            "frames": [f.to_dict() for f in self.frames],
            "metadata": dict(self.metadata),
        }


@dataclass
class Catalog:
    storyboard: Storyboard
    grammar: DetectorGrammar = field(default_factory=DetectorGrammar)
    fragments: list[FragmentRecord] = field(default_factory=list)
    base_dir: Path | None = field(default=None, compare=False)
    warnings: list[str] = field(default_factory=list, compare=False)

    def to_dict(self) -> dict:
        return {
            "storyboard": storyboard_to_dict(self.storyboard),
            "grammar": self.grammar.to_list(),
            "fragments": [f.to_dict() for f in self.fragments],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _field(obj: dict, name: str, typ: type, where: str):
    if not isinstance(obj, dict) or name not in obj:
        raise CatalogError(f"{where}: missing field {name!r}")
    value = obj[name]
    if not isinstance(value, typ) or (typ is int and isinstance(value, bool)):
        raise CatalogError(f"{where}.{name}: expected {typ.__name__}, got {value!r}")
    return value


def _frame_from_dict(data: dict, where: str) -> FrameRef:
    width = _field(data, "width", int, where)
    height = _field(data, "height", int, where)
    if width < 1 or height < 1:
        raise CatalogError(f"{where}: frame size must be positive")
    has_path, has_seed = "path" in data, "seed" in data
    if has_path == has_seed:
        raise CatalogError(f"{where}: exactly one of 'path' or 'seed' is required")
    if has_path:
        return FrameRef(width, height, path=_field(data, "path", str, where))
    return FrameRef(width, height, seed=_field(data, "seed", int, where))


def _fragment_from_dict(data: dict, where: str) -> FragmentRecord:
    fragment_id = _field(data, "fragment_id", str, where)
    start = _field(data, "start_ms", int, where)
    end = _field(data, "end_ms", int, where)
    if not fragment_id:
        raise CatalogError(f"{where}.fragment_id: must be non-empty")
    if not 0 <= start < end:
        raise CatalogError(f"{where}: need 0 <= start_ms < end_ms, got {start}..{end}")
    raw_addr = _field(data, "story_address", str, where)
    try:
        addr = parse_address(raw_addr)
    except StoryboardError as e:
        # a malformed address cannot resolve to any unit
        raise CatalogError(f"{where}.story_address: dangling story address {raw_addr!r} ({e})") from None
    frames = data.get("frames", [])
    metadata = data.get("metadata", {})
    if not isinstance(frames, list):
        raise CatalogError(f"{where}.frames: expected array")
    if not isinstance(metadata, dict):
        raise CatalogError(f"{where}.metadata: expected object")
    return FragmentRecord(
        fragment_id=fragment_id,
        source=_field(data, "source", str, where),
        start_ms=start,
        end_ms=end,
        story_address=addr,
        frames=tuple(_frame_from_dict(f, f"{where}.frames[{i}]") for i, f in enumerate(frames)),
        metadata={str(k): str(v) for k, v in metadata.items()},
    )


def catalog_from_dict(data: dict, base_dir: Path | None = None) -> Catalog:
    if not isinstance(data, dict):
        raise CatalogError("catalog must be a JSON object")
    try:
        board = storyboard_from_dict(_field(data, "storyboard", dict, "catalog"))
    except StoryboardError as e:
        raise CatalogError(f"storyboard: {e}") from None
    problems = validate_storyboard(board)
    if problems:
        raise CatalogError("storyboard: " + "; ".join(str(p) for p in problems))
    try:
        grammar = DetectorGrammar.from_list(data.get("grammar", []))
    except DetectorError as e:
        raise CatalogError(f"grammar: {e}") from None

    raw = data.get("fragments", [])
    if not isinstance(raw, list):
        raise CatalogError("catalog.fragments: expected array")
    fragments = [_fragment_from_dict(f, f"fragments[{i}]") for i, f in enumerate(raw)]

    seen = set()
    for frag in fragments:
        if frag.fragment_id in seen:
            raise CatalogError(f"duplicate fragment_id {frag.fragment_id!r}")
        seen.add(frag.fragment_id)
        try:
            get_unit(board, frag.story_address)
        except UnitNotFound:
            raise CatalogError(
                f"fragment {frag.fragment_id!r}: dangling story address "
                f"{format_address(frag.story_address)}"
            ) from None

    fragments.sort(key=lambda f: (f.source, f.start_ms, f.fragment_id))
    warnings = []
    latest: dict[str, FragmentRecord] = {}  # per source, the fragment ending last so far
    for cur in fragments:
        prev = latest.get(cur.source)
        if prev is not None and cur.start_ms < prev.end_ms:
            warnings.append(
                f"fragments {prev.fragment_id!r} and {cur.fragment_id!r} overlap in {cur.source!r}"
            )
        if prev is None or cur.end_ms > prev.end_ms:
            latest[cur.source] = cur
    for w in warnings:
        log.warning(w)
    return Catalog(board, grammar, fragments, base_dir, warnings)


def load_catalog(path: str | Path) -> Catalog:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CatalogError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    return catalog_from_dict(data, base_dir=path.parent)


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_text(catalog.dumps(), encoding="utf-8")


def fragment_documents(catalog: Catalog, ast_partitions: int | None = None) -> list[Document]:
    docs = []
    for frag in catalog.fragments:
        for i, ref in enumerate(frag.frames):
            object_id = f"{frag.fragment_id}/{i}"
            try:
                frame = ref.load(catalog.base_dir)
                layout = None
                if ast_partitions is not None:
                    layout = ast_partition(ast_partitions, frame.width, frame.height)
                tree = detect_object(catalog.grammar, object_id, frame, frag.metadata, layout)
                found = tuples_to_terms(tuples_from_tree(tree))
            except (DetectorError, FrameError, PartitionError, OSError) as e:
                raise CatalogError(f"fragment {frag.fragment_id!r} frame {i}: {e}") from e
            # objects with no detector output still get a (empty) document
            docs.append(found[0] if found else Document(object_id, ""))
    return docs


def ingest_pipeline(catalog: Catalog, ast_partitions: int | None = None) -> InvertedIndex:
    """Index the storyboard units together with every fragment frame's detector tuples."""
    docs = flatten_storyboard(catalog.storyboard) + fragment_documents(catalog, ast_partitions)
    docs.sort(key=lambda d: d.id)
    return build_index(docs)
