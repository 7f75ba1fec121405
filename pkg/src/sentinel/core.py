"""Geometry, raster and time primitives shared by every stage of the pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

Point = Tuple[float, float]


class ConfigurationError(ValueError):
    """Raised when inputs disagree on shape or a setting is out of range."""


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in integer pixels, (x, y) is the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"degenerate box {self.w}x{self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def center(self) -> Point:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def clamp(self, width: int, height: int) -> Optional["BBox"]:
        """Clip to the frame; None when nothing is left."""
        x1, y1 = max(self.x, 0), max(self.y, 0)
        x2, y2 = min(self.x2, width), min(self.y2, height)
        if x2 <= x1 or y2 <= y1:
            return None
        return BBox(x1, y1, x2 - x1, y2 - y1)

    def dilate(self, margin: int, width: int, height: int) -> "BBox":
        grown = BBox(self.x - margin, self.y - margin, self.w + 2 * margin, self.h + 2 * margin)
        return grown.clamp(width, height) or self

    def intersection(self, other: "BBox") -> int:
        iw = min(self.x2, other.x2) - max(self.x, other.x)
        ih = min(self.y2, other.y2) - max(self.y, other.y)
        return max(iw, 0) * max(ih, 0)

    def contains(self, p: Point) -> bool:
        return self.x <= p[0] < self.x2 and self.y <= p[1] < self.y2

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)


def iou(a: BBox, b: BBox) -> float:
    inter = a.intersection(b)
    if inter == 0:
        return 0.0
    return inter / float(a.area + b.area - inter)


def centroid_distance(box: BBox, p: Point) -> float:
    cx, cy = box.center
    return math.hypot(cx - p[0], cy - p[1])


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """An RGB raster (H, W, 3) uint8 tagged with its frame index."""

    pixels: np.ndarray
    index: int = 0
    fps: float = 25.0

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 3 or px.shape[2] != 3 or px.dtype != np.uint8:
            raise ConfigurationError(f"frame must be HxWx3 uint8, got {px.shape} {px.dtype}")
        object.__setattr__(self, "pixels", _frozen(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def timestamp(self) -> float:
        return self.index / self.fps

    def crop(self, box: BBox) -> np.ndarray:
        b = box.clamp(self.width, self.height)
        if b is None:
            return np.zeros((0, 0, 3), np.uint8)
        return self.pixels[b.y:b.y2, b.x:b.x2].copy()

    @classmethod
    def blank(cls, width: int, height: int, color=(0, 0, 0), index: int = 0, fps: float = 25.0) -> "Frame":
        px = np.empty((height, width, 3), np.uint8)
        px[:] = color
        return cls(px, index, fps)


@dataclass(frozen=True, eq=False)
class Mask:
    """Binary image with the same height/width as the frame it came from."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen(np.asarray(self.bits, dtype=bool)))

    @classmethod
    def empty(cls, width: int, height: int) -> "Mask":
        return cls(np.zeros((height, width), bool))

    @classmethod
    def full(cls, width: int, height: int) -> "Mask":
        return cls(np.ones((height, width), bool))

    @classmethod
    def from_box(cls, width: int, height: int, box: BBox) -> "Mask":
        bits = np.zeros((height, width), bool)
        b = box.clamp(width, height)
        if b is not None:
            bits[b.y:b.y2, b.x:b.x2] = True
        return cls(bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def _check(self, other: "Mask"):
        if self.bits.shape != other.bits.shape:
            raise ConfigurationError(f"mask size mismatch {self.bits.shape} vs {other.bits.shape}")

    def __and__(self, other: "Mask") -> "Mask":
        self._check(other)
        return Mask(self.bits & other.bits)

    def __or__(self, other: "Mask") -> "Mask":
        self._check(other)
        return Mask(self.bits | other.bits)

    def __xor__(self, other: "Mask") -> "Mask":
        self._check(other)
        return Mask(self.bits ^ other.bits)

    def __invert__(self) -> "Mask":
        return Mask(~self.bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mask) and np.array_equal(self.bits, other.bits)

    __hash__ = None

    def any(self) -> bool:
        return bool(self.bits.any())

    def count(self) -> int:
        return int(self.bits.sum())

    def coverage(self, box: BBox) -> float:
        """Fraction of the box's area that is set (pixels outside the frame count as unset)."""
        b = box.clamp(self.width, self.height)
        if b is None:
            return 0.0
        return float(self.bits[b.y:b.y2, b.x:b.x2].sum()) / box.area


@dataclass(frozen=True)
class Clock:
    """Frame-indexed time. Durations in seconds convert to whole frames exactly."""

    fps: float = 25.0
    index: int = 0

    def __post_init__(self):
        if self.fps <= 0:
            raise ConfigurationError("fps must be positive")

    @property
    def seconds(self) -> float:
        return self.index / self.fps

    def frames(self, seconds: float) -> int:
        exact = Fraction(str(seconds)) * Fraction(str(self.fps))
        return int(round(exact))

    def at(self, index: int) -> "Clock":
        return Clock(self.fps, index)

    def tick(self) -> "Clock":
        return Clock(self.fps, self.index + 1)
