"""Almost Square Tiles (AST) frame partitioning.

Splits a W x H frame into exactly ``n`` near-square rectangles so that each
worker of a parallel detector gets roughly the same pixel count. The grid
has ``cols`` columns; the leftmost ``cols - irr_cols`` "regular" columns
hold ``rows`` tiles each and the rightmost ``irr_cols`` "irregular" columns
hold ``rows - 1`` taller tiles. Widths are chosen so that all tiles have
(almost) the same area::

    regular column      irregular column
    +-------+           +----+
    | a x b |  RST      |    |  IST / ICET   (ar x bp, last column bpp)
    +-------+           |    |
    | ap x b|  RET      +----+
    +-------+           |    |  IRET / IRCET (arp x bp, last column bpp)
                        +----+

Excess tiles (``ap``, ``arp``, ``bpp``) absorb the integer remainders.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import asdict, dataclass, field


class PartitionError(ValueError):
    def __init__(self, message: str, symbol: str | None = None):
        super().__init__(message)
        self.symbol = symbol


class TileClass(str, enum.Enum):
    RST = "RST"  # regular standard
    RET = "RET"  # regular excess (bottom of a regular column)
    IST = "IST"  # irregular standard
    ICET = "ICET"  # irregular, last column
    IRET = "IRET"  # irregular, bottom row excess
    IRCET = "IRCET"  # irregular, last column and bottom row


@dataclass(frozen=True)
class Tile:
    x: int
    y: int
    width: int
    height: int
    col_index: int
    row_index: int
    tile_class: TileClass

    @property
    def area(self) -> int:
        return self.width * self.height

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
            "col_index": self.col_index,
            "row_index": self.row_index,
            "class": self.tile_class.value,
        }


@dataclass(frozen=True)
class PartitionLayout:
    image_width: int
    image_height: int
    partitions: int
    k: int
    first_square: int
    cols: int
    rows: int
    irr_cols: int
    a: int
    ap: int
    ar: int
    arp: int
    b: int
    bp: int
    bpp: int
    tiles: tuple[Tile, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tiles"] = [t.to_dict() for t in self.tiles]
        return d


def ast_partition(n: int, width: int, height: int) -> PartitionLayout:
    """Partition a ``width`` x ``height`` frame into ``n`` AST tiles.

    Raises PartitionError naming the derived symbol that fell below one
    pixel when the frame is too small.
    """
    if n < 1:
        raise PartitionError(f"partitions must be >= 1, got {n}", "n")
    if width < 1 or height < 1:
        raise PartitionError(f"image must be at least 1x1, got {width}x{height}", "W" if width < 1 else "H")
    if n > width * height:
        raise PartitionError(f"{n} partitions exceed {width}x{height} pixels", "n")

    first_square = math.isqrt(n - 1) + 1
    k = first_square * first_square
    cols = first_square
    if math.isqrt(n) ** 2 == n:
        rows = first_square
    elif (first_square - 1) * cols >= n:
        rows = first_square - 1
    else:
        rows = first_square
    irr_cols = cols * rows - n
    reg_cols = cols - irr_cols

    def check(name: str, value: int) -> int:
        if value < 1:
            raise PartitionError(
                f"image {width}x{height} too small for {n} tiles: {name} = {value}",
                name,
            )
        return value

    a = check("a", height // rows)
    ap = check("ap", height - a * (rows - 1))
    if irr_cols:
        ar = check("ar", height // (rows - 1))
        arp = check("arp", height - ar * (rows - 2))
        b = check("b", width * ar // (ar * reg_cols + a * irr_cols))
        bp = check("bp", (width - b * reg_cols) // irr_cols)
        bpp = check("bpp", width - b * reg_cols - bp * (irr_cols - 1))
    else:
        ar = arp = bp = bpp = 0
        b = check("b", width // cols)

    tiles = []
    x = 0
    for c in range(reg_cols):
        w = b
        if not irr_cols and c == cols - 1:
            w = width - b * (cols - 1)
        y = 0
        for r in range(rows):
            last = r == rows - 1
            h = ap if last else a
            cls = TileClass.RET if last else TileClass.RST
            tiles.append(Tile(x, y, w, h, c, r, cls))
            y += h
        x += w
    for j in range(irr_cols):
        c = reg_cols + j
        last_col = j == irr_cols - 1
        w = bpp if last_col else bp
        y = 0
        for r in range(rows - 1):
            bottom = r == rows - 2
            h = arp if bottom else ar
            if bottom:
                cls = TileClass.IRCET if last_col else TileClass.IRET
            else:
                cls = TileClass.ICET if last_col else TileClass.IST
            tiles.append(Tile(x, y, w, h, c, r, cls))
            y += h
        x += w

    return PartitionLayout(
        image_width=width,
        image_height=height,
        partitions=n,
        k=k,
        first_square=first_square,
        cols=cols,
        rows=rows,
        irr_cols=irr_cols,
        a=a,
        ap=ap,
        ar=ar,
        arp=arp,
        b=b,
        bp=bp,
        bpp=bpp,
        tiles=tuple(tiles),
    )


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    overlap_found: bool
    out_of_bounds: bool
    area_sum: int
    tile_count: int


def verify_layout(layout: PartitionLayout) -> CoverageReport:
    """Exact-cover check by sweeping vertical slabs between tile x-edges.

    Inside each slab the tiles spanning it must stack as contiguous,
    non-overlapping y-intervals from 0 to the image height.
    """
    W, H = layout.image_width, layout.image_height
    tiles = layout.tiles
    area_sum = sum(t.area for t in tiles)
    oob = any(
        t.x < 0 or t.y < 0 or t.width < 1 or t.height < 1
        or t.x + t.width > W or t.y + t.height > H
        for t in tiles
    )
    xs = sorted({0, W} | {t.x for t in tiles} | {t.x + t.width for t in tiles})
    overlap = False
    gap = False
    for x0, x1 in zip(xs, xs[1:]):
        spans = sorted(
            (t.y, t.y + t.height) for t in tiles if t.x <= x0 and x1 <= t.x + t.width
        )
        cursor = 0
        for y0, y1 in spans:
            if y0 < cursor:
                overlap = True
            elif y0 > cursor and 0 <= x0 < W:
                gap = True
            cursor = max(cursor, y1)
        if 0 <= x0 < W and cursor < H:
            gap = True
    covered = not (overlap or gap or oob)
    return CoverageReport(covered, overlap, oob, area_sum, len(tiles))


@dataclass(frozen=True)
class LayoutStats:
    min_area: int
    max_area: int
    mean_area: float
    imbalance: float
    worst_aspect: float
    class_counts: dict[TileClass, int]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class_counts"] = {c.value: n for c, n in self.class_counts.items()}
        return d


def layout_stats(layout: PartitionLayout) -> LayoutStats:
    areas = [t.area for t in layout.tiles]
    mean = sum(areas) / len(areas)
    aspect = max(max(t.width / t.height, t.height / t.width) for t in layout.tiles)
    counts = Counter(t.tile_class for t in layout.tiles)
    return LayoutStats(
        min_area=min(areas),
        max_area=max(areas),
        mean_area=mean,
        imbalance=max(areas) / mean,
        worst_aspect=aspect,
        class_counts={c: counts[c] for c in TileClass if counts[c]},
    )
