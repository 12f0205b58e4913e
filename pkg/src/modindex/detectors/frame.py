"""Grayscale frames and binary PGM (P5) I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class FrameError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SyntheticFrame:
    """Row-major 8-bit grayscale frame."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise FrameError(f"frame must be at least 1x1, got {self.width}x{self.height}")
        arr = np.asarray(self.pixels)
        if arr.size != self.width * self.height:
            raise FrameError(
                f"{self.width}x{self.height} frame needs {self.width * self.height} "
                f"pixels, got {arr.size}"
            )
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise FrameError("pixel values must be in 0..255")
        object.__setattr__(
            self, "pixels", arr.astype(np.uint8).reshape(self.height, self.width)
        )

    @classmethod
    def from_values(cls, width: int, height: int, values) -> "SyntheticFrame":
        return cls(width, height, np.asarray(list(values), dtype=np.int64))

    @classmethod
    def uniform(cls, width: int, height: int, value: int = 0) -> "SyntheticFrame":
        return cls(width, height, np.full(width * height, value, dtype=np.uint8))

    @classmethod
    def from_seed(cls, seed: int, width: int, height: int) -> "SyntheticFrame":
        rng = np.random.default_rng(seed)
        return cls(width, height, rng.integers(0, 256, size=width * height, dtype=np.uint8))

    def crop(self, x: int, y: int, width: int, height: int) -> "SyntheticFrame":
        return SyntheticFrame(width, height, self.pixels[y : y + height, x : x + width].copy())

    def values(self) -> list[int]:
        return self.pixels.ravel().tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SyntheticFrame):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )


def _header_fields(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header fields, skipping # comments."""
    fields: list[bytes] = []
    i = 0
    while len(fields) < count:
        if i >= len(data):
            raise FrameError("truncated PGM header")
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            end = data.find(b"\n", i)
            i = len(data) if end < 0 else end + 1
        else:
            start = i
            while i < len(data) and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
                i += 1
            fields.append(data[start:i])
    # exactly one whitespace byte separates the header from the raster
    if i >= len(data) or not data[i : i + 1].isspace():
        raise FrameError("truncated PGM header")
    return fields, i + 1


def decode_pgm(data: bytes) -> SyntheticFrame:
    fields, offset = _header_fields(data, 4)
    if fields[0] != b"P5":
        raise FrameError(f"not a binary PGM (magic {fields[0]!r})")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise FrameError("non-integer PGM header field") from None
    if maxval != 255:
        raise FrameError(f"only maxval 255 is supported, got {maxval}")
    raster = data[offset : offset + width * height]
    if len(raster) != width * height:
        raise FrameError(
            f"PGM raster holds {len(raster)} bytes, expected {width * height}"
        )
    return SyntheticFrame(width, height, np.frombuffer(raster, dtype=np.uint8))


def encode_pgm(frame: SyntheticFrame) -> bytes:
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def read_pgm(path: str | Path) -> SyntheticFrame:
    return decode_pgm(Path(path).read_bytes())


def write_pgm(frame: SyntheticFrame, path: str | Path) -> None:
    Path(path).write_bytes(encode_pgm(frame))
