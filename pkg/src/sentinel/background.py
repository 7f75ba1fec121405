"""Dual long-term / short-term background model.

Each model keeps ``samples`` RGB values per pixel in a ring buffer. The
long-term model takes a frame every ``long_interval`` frames, the short-term one
every ``short_interval`` frames; the newest frame always overwrites the oldest
sample. A pixel is foreground when fewer than ``min_consensus`` samples lie
within ``match_radius`` (Euclidean RGB) of its current color.

Foreground queries are incremental: the per-pixel match count is cached for
the last queried frame and only pixels whose color changed, or whose replaced
sample changed its vote, are re-evaluated. ``naive_foreground`` recomputes the
whole image and serves as the reference.
"""

from __future__ import annotations

import enum
from typing import Optional

import cv2
import numpy as np

from sentinel.config import BackgroundConfig
from sentinel.core import BBox, ConfigurationError, Frame, Mask


class NotReady(RuntimeError):
    """Foreground requested before any frame seeded the model."""


class ObjectMotionState(enum.Enum):
    STATIC = "Static"
    MOVING = "Moving"
    LONG_STATIC = "LongStatic"


class Which(enum.Enum):
    LONG = "long"
    SHORT = "short"


def _sq_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a.astype(np.int32) - b.astype(np.int32)
    return np.einsum("...c,...c->...", d, d)


class SampleModel:
    """One ring buffer of per-pixel color samples."""

    def __init__(self, width: int, height: int, n_samples: int, interval: int,
                 match_radius: float, min_consensus: int):
        self.width = width
        self.height = height
        self.interval = interval
        self.min_consensus = min_consensus
        self.radius_sq = float(match_radius) ** 2
        self.samples = np.zeros((n_samples, height, width, 3), np.uint8)
        self.ptr = 0
        self.ready = False
        self._ref: Optional[np.ndarray] = None
        self._count: Optional[np.ndarray] = None

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    def seed(self, pixels: np.ndarray) -> None:
        self.samples[:] = pixels
        self.ptr = 0
        self.ready = True
        self._ref = None
        self._count = None

    def ingest(self, pixels: np.ndarray, index: int) -> bool:
        if not self.ready:
            self.seed(pixels)
        if index % self.interval != 0:
            return False
        slot = self.samples[self.ptr]
        if self._ref is not None:
            old_vote = _sq_dist(self._ref, slot) <= self.radius_sq
            new_vote = _sq_dist(self._ref, pixels) <= self.radius_sq
            self._count += new_vote.astype(np.int16) - old_vote.astype(np.int16)
        slot[:] = pixels
        self.ptr = (self.ptr + 1) % self.n_samples
        return True

    def match_count(self, pixels: np.ndarray) -> np.ndarray:
        if not self.ready:
            raise NotReady("background model has not seen a frame yet")
        if self._ref is None:
            self._count = (_sq_dist(self.samples, pixels[None]) <= self.radius_sq).sum(0).astype(np.int16)
        else:
            changed = np.any(pixels != self._ref, axis=2)
            ys, xs = np.nonzero(changed)
            if len(ys):
                votes = _sq_dist(self.samples[:, ys, xs], pixels[ys, xs][None]) <= self.radius_sq
                self._count[ys, xs] = votes.sum(0)
        self._ref = pixels.copy()
        return self._count

    def foreground(self, pixels: np.ndarray) -> np.ndarray:
        return self.match_count(pixels) < self.min_consensus

    def naive_foreground(self, pixels: np.ndarray) -> np.ndarray:
        if not self.ready:
            raise NotReady("background model has not seen a frame yet")
        votes = np.zeros((self.height, self.width), np.int32)
        for k in range(self.n_samples):
            votes += _sq_dist(self.samples[k], pixels) <= self.radius_sq
        return votes < self.min_consensus


class DualBackground:
    """Long-term model for static foreground, short-term model for motion."""

    def __init__(self, width: int, height: int, cfg: Optional[BackgroundConfig] = None):
        self.cfg = cfg or BackgroundConfig()
        c = self.cfg
        self.width = width
        self.height = height
        self.long = SampleModel(width, height, c.samples, c.long_interval, c.match_radius, c.min_consensus)
        self.short = SampleModel(width, height, c.samples, c.short_interval, c.match_radius, c.min_consensus)

    @property
    def ready(self) -> bool:
        return self.long.ready and self.short.ready

    def _check(self, frame: Frame):
        if (frame.width, frame.height) != (self.width, self.height):
            raise ConfigurationError(
                f"frame {frame.width}x{frame.height} does not match model {self.width}x{self.height}")

    def ingest(self, frame: Frame) -> "DualBackground":
        """Feed one frame. The first frame seeds every sample slot."""
        self._check(frame)
        self.long.ingest(frame.pixels, frame.index)
        self.short.ingest(frame.pixels, frame.index)
        return self

    def model(self, which: Which) -> SampleModel:
        return self.long if which is Which.LONG else self.short

    def foreground(self, frame: Frame, which: Which) -> Mask:
        self._check(frame)
        return Mask(self.model(which).foreground(frame.pixels))

    def background_image(self, index: int = 0) -> Frame:
        """Per-pixel median of the long-term buffer."""
        if not self.long.ready:
            raise NotReady("background model has not seen a frame yet")
        med = np.median(self.long.samples, axis=0)
        return Frame(np.round(med).astype(np.uint8), index)


def cleanup(mask: Mask) -> Mask:
    """3x3 morphological opening followed by closing."""
    kernel = np.ones((3, 3), np.uint8)
    m = mask.bits.astype(np.uint8)
    m = cv2.morphologyEx(m, cv2.MORPH_OPEN, kernel)
    m = cv2.morphologyEx(m, cv2.MORPH_CLOSE, kernel)
    return Mask(m.astype(bool))


def static_regions(f_long: Mask, f_short: Mask) -> Mask:
    """Long-term foreground that is absent from the short-term foreground.

    This is the half of ``f_long ^ f_short`` lying inside ``f_long``; the other
    half is fresh motion and never a static candidate.
    """
    if f_long.bits.shape != f_short.bits.shape:
        raise ConfigurationError("static_regions: mask size mismatch")
    return f_long & ~f_short


def classify_motion(box: BBox, f_long: Mask, f_short: Mask, coverage_threshold: float = 0.5) -> ObjectMotionState:
    in_long = f_long.coverage(box) >= coverage_threshold
    in_short = f_short.coverage(box) >= coverage_threshold
    if in_long and not in_short:
        return ObjectMotionState.STATIC
    if not in_long and not in_short:
        return ObjectMotionState.LONG_STATIC
    # short-term foreground alone (e.g. a long-absorbed object lifted away) counts as motion
    return ObjectMotionState.MOVING
