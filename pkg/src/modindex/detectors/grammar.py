"""Grammar-driven feature detection.

A detector grammar is an ordered list of rules ``(kind, detector, params)``.
Running it over one media object yields a parse tree with one node per
executed rule; flattening the tree gives ``(object, path, attribute, value)``
tuples that are unique per object and can be indexed as plain terms.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

from modindex.detectors.frame import SyntheticFrame
from modindex.partition import PartitionLayout
from modindex.textindex import Document, tokenize


class DetectorError(ValueError):
    pass


class MediaKind(str, enum.Enum):
    VOICE = "voice"  # detector X
    IMAGE = "image"  # detector Y
    TEXT = "text"  # detector Z


Attributes = list[tuple[str, str]]
DetectorFn = Callable[[SyntheticFrame | None, Mapping[str, str], Mapping[str, str]], Attributes]


@dataclass(frozen=True)
class Rule:
    kind: MediaKind
    detector: str
    params: dict[str, str] = field(default_factory=dict)

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.detector}"

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "detector": self.detector, "params": dict(self.params)}


@dataclass(frozen=True)
class DetectorGrammar:
    rules: tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for rule in self.rules:
            if (rule.kind, rule.detector) not in REGISTRY:
                raise DetectorError(f"unregistered detector {rule}")
            key = (rule.kind, rule.detector)
            if key in seen:
                raise DetectorError(f"duplicate rule {rule}")
            seen.add(key)

    def for_kind(self, kind: MediaKind) -> list[Rule]:
        return [r for r in self.rules if r.kind == kind]

    def to_list(self) -> list[dict]:
        return [r.to_dict() for r in self.rules]

    @classmethod
    def from_list(cls, data: list) -> "DetectorGrammar":
        if not isinstance(data, list):
            raise DetectorError("grammar must be a JSON array")
        rules = []
        for i, item in enumerate(data):
            try:
                kind = MediaKind(item["kind"])
                name = item["detector"]
                params = item.get("params", {})
            except (KeyError, TypeError, AttributeError):
                raise DetectorError(f"grammar[{i}]: needs 'kind' and 'detector'") from None
            except ValueError:
                raise DetectorError(f"grammar[{i}].kind: unknown kind {item['kind']!r}") from None
            if not isinstance(name, str) or not isinstance(params, dict):
                raise DetectorError(f"grammar[{i}]: bad detector name or params")
            rules.append(Rule(kind, name, {str(k): str(v) for k, v in params.items()}))
        return cls(tuple(rules))


def load_grammar(path: str | Path) -> DetectorGrammar:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DetectorError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None
    return DetectorGrammar.from_list(data)


# -- image detectors ---------------------------------------------------------


def _int_param(params: Mapping[str, str], name: str, default: int, lo: int, hi: int) -> int:
    raw = params.get(name, default)
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise DetectorError(f"parameter {name}={raw!r} is not an integer") from None
    if not lo <= value <= hi:
        raise DetectorError(f"parameter {name}={value} outside {lo}..{hi}")
    return value


def bin_edges(bins: int) -> list[int]:
    return [256 * i // bins for i in range(bins + 1)]


def color_histogram(frame: SyntheticFrame, bins: int) -> list[int]:
    """Pixel counts per intensity bin; bin i covers [256*i//bins, 256*(i+1)//bins)."""
    if not 2 <= bins <= 256:
        raise DetectorError(f"bins must be in 2..256, got {bins}")
    lut = np.searchsorted(bin_edges(bins), np.arange(256), side="right") - 1
    counts = np.bincount(lut[frame.pixels.ravel()], minlength=bins)
    return counts.tolist()


def edge_density(frame: SyntheticFrame, threshold: int) -> float:
    """Fraction of pixels whose right or lower neighbour differs by >= threshold."""
    if not 1 <= threshold <= 255:
        raise DetectorError(f"threshold must be in 1..255, got {threshold}")
    if frame.width < 2 or frame.height < 2:
        raise DetectorError(f"edge detection needs at least 2x2, got {frame.width}x{frame.height}")
    px = frame.pixels.astype(np.int16)
    edge = np.zeros(px.shape, dtype=bool)
    edge[:, :-1] |= np.abs(px[:, :-1] - px[:, 1:]) >= threshold
    edge[:-1, :] |= np.abs(px[:-1, :] - px[1:, :]) >= threshold
    return float(edge.sum()) / edge.size


def _histogram(frame, metadata, params) -> Attributes:
    counts = color_histogram(frame, _int_param(params, "bins", 16, 2, 256))
    dominant = max(range(len(counts)), key=lambda i: (counts[i], -i))
    attrs = [("dominant_bin", str(dominant))]
    attrs += [(f"bin_{i}", str(c)) for i, c in enumerate(counts) if c]
    return attrs


def _edges(frame, metadata, params) -> Attributes:
    density = edge_density(frame, _int_param(params, "threshold", 32, 1, 255))
    return [("edge_density", f"{density:.4f}")]


# -- voice / text detectors (metadata lookups) -------------------------------

INSTRUMENT_FAMILIES = {
    "drum": "percussion",
    "gamelan": "percussion",
    "kendang": "percussion",
    "tabuh": "percussion",
    "guitar": "stringed",
    "violin": "stringed",
    "kecapi": "stringed",
    "sitar": "stringed",
    "flute": "wind",
    "suling": "wind",
    "trumpet": "wind",
    "piano": "keyboard",
}


def age_band(age: str) -> str:
    try:
        years = int(age)
    except ValueError:
        raise DetectorError(f"age {age!r} is not an integer") from None
    if years < 0:
        raise DetectorError(f"negative age {years}")
    low = years // 10 * 10
    return f"{low}-{low + 9}"


def _speaker(frame, metadata, params) -> Attributes:
    attrs = []
    if "gender" in metadata:
        attrs.append(("gender", metadata["gender"]))
    if "region" in metadata:
        attrs.append(("region", metadata["region"]))
    if "age" in metadata:
        attrs.append(("age_band", age_band(metadata["age"])))
    return attrs


def _music(frame, metadata, params) -> Attributes:
    instrument = metadata["instrument"].strip().lower()
    return [
        ("instrument", instrument),
        ("family", INSTRUMENT_FAMILIES.get(instrument, "other")),
    ]


def _caption(frame, metadata, params) -> Attributes:
    words = tokenize(metadata[params.get("field", "caption")])
    counts: dict[str, int] = {}
    for w in words:
        counts[w] = counts.get(w, 0) + 1
    return [("words", str(len(words)))] + [(f"w_{w}", str(c)) for w, c in counts.items()]


_MOVEMENT_FIELDS = ("robot_type", "robot_form", "movement_type", "movement_count")


def _movement(frame, metadata, params) -> Attributes:
    return [(f, metadata[f]) for f in _MOVEMENT_FIELDS if f in metadata]


@dataclass(frozen=True)
class Detector:
    fn: DetectorFn
    needs_frame: bool = False
    # metadata keys of which at least one must be present
    needs_any: tuple[str, ...] = ()

    def check_inputs(self, rule: Rule, frame, metadata: Mapping[str, str]) -> None:
        if self.needs_frame and frame is None:
            raise DetectorError(f"rule {rule} needs a frame")
        keys = self.needs_any
        if rule.detector == "caption":
            keys = (rule.params.get("field", "caption"),)
        if keys and not any(k in metadata for k in keys):
            raise DetectorError(
                f"rule {rule} needs metadata field {' or '.join(keys)}"
            )


REGISTRY: dict[tuple[MediaKind, str], Detector] = {
    (MediaKind.IMAGE, "histogram"): Detector(_histogram, needs_frame=True),
    (MediaKind.IMAGE, "edges"): Detector(_edges, needs_frame=True),
    (MediaKind.VOICE, "speaker"): Detector(_speaker, needs_any=("gender", "region", "age")),
    (MediaKind.VOICE, "music"): Detector(_music, needs_any=("instrument",)),
    (MediaKind.TEXT, "caption"): Detector(_caption),
    (MediaKind.TEXT, "movement"): Detector(_movement, needs_any=_MOVEMENT_FIELDS),
}


def register_detector(
    kind: MediaKind,
    name: str,
    fn: DetectorFn,
    needs_frame: bool = False,
    needs_any: tuple[str, ...] = (),
) -> None:
    """Plug in another detector (e.g. one backed by a real audio model)."""
    REGISTRY[(kind, name)] = Detector(fn, needs_frame, needs_any)


# -- parse trees ---------------------------------------------------------------


@dataclass(frozen=True)
class ParseNode:
    name: str
    attributes: tuple[tuple[str, str], ...] = ()
    children: tuple["ParseNode", ...] = ()


@dataclass(frozen=True)
class ParseTree:
    object_id: str
    nodes: tuple[ParseNode, ...] = ()


@dataclass(frozen=True)
class FeatureTuple:
    object_id: str
    path: str
    attribute: str
    value: str


def _run_rule(rule: Rule, frame, metadata) -> ParseNode:
    detector = REGISTRY.get((rule.kind, rule.detector))
    if detector is None:
        raise DetectorError(f"unregistered detector {rule}")
    detector.check_inputs(rule, frame, metadata)
    return ParseNode(rule.detector, tuple(detector.fn(frame, metadata, rule.params)))


def run_grammar(
    grammar: DetectorGrammar,
    object_id: str,
    kind: MediaKind,
    frame: SyntheticFrame | None = None,
    metadata: Mapping[str, str] | None = None,
) -> ParseTree:
    """Run every rule of ``kind`` in grammar order, one node per rule."""
    metadata = metadata or {}
    nodes = tuple(_run_rule(r, frame, metadata) for r in grammar.for_kind(kind))
    return ParseTree(object_id, nodes)


def detect_object(
    grammar: DetectorGrammar,
    object_id: str,
    frame: SyntheticFrame | None = None,
    metadata: Mapping[str, str] | None = None,
    layout: PartitionLayout | None = None,
) -> ParseTree:
    """Run all rules over one object.

    With a ``layout``, image rules run per tile and their nodes nest under
    ``tile_<row>_<col>`` nodes, ordered by (col, row). Voice and text rules
    follow in grammar order.
    """
    metadata = metadata or {}
    nodes: list[ParseNode] = []
    image_rules = grammar.for_kind(MediaKind.IMAGE)
    if layout is not None and image_rules:
        if frame is None:
            raise DetectorError(f"rule {image_rules[0]} needs a frame")
        if (layout.image_width, layout.image_height) != (frame.width, frame.height):
            raise DetectorError("layout does not match frame size")
        for tile in sorted(layout.tiles, key=lambda t: (t.col_index, t.row_index)):
            sub = frame.crop(tile.x, tile.y, tile.width, tile.height)
            children = tuple(_run_rule(r, sub, metadata) for r in image_rules)
            nodes.append(ParseNode(f"tile_{tile.row_index}_{tile.col_index}", (), children))
    else:
        nodes.extend(run_grammar(grammar, object_id, MediaKind.IMAGE, frame, metadata).nodes)
    for kind in (MediaKind.VOICE, MediaKind.TEXT):
        nodes.extend(run_grammar(grammar, object_id, kind, frame, metadata).nodes)
    return ParseTree(object_id, tuple(nodes))


def tuples_from_tree(tree: ParseTree) -> list[FeatureTuple]:
    out: list[FeatureTuple] = []
    seen: set[tuple[str, str]] = set()

    def visit(node: ParseNode, prefix: str) -> None:
        path = f"{prefix}/{node.name}" if prefix else node.name
        for attr, value in node.attributes:
            if (path, attr) in seen:
                raise DetectorError(
                    f"duplicate tuple {tree.object_id}/{path}/{attr} (detector bug)"
                )
            seen.add((path, attr))
            out.append(FeatureTuple(tree.object_id, path, attr, value))
        for child in node.children:
            visit(child, path)

    for node in tree.nodes:
        visit(node, "")
    return out


def _termify(text: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in text)


def tuples_to_terms(tuples: Iterable[FeatureTuple]) -> list[Document]:
    """One document per object; each tuple becomes a ``path_attribute_value`` term."""
    groups: dict[str, list[str]] = {}
    for t in tuples:
        groups.setdefault(t.object_id, []).append(
            _termify(f"{t.path}_{t.attribute}_{t.value}")
        )
    return [Document(oid, " ".join(terms)) for oid, terms in groups.items()]
