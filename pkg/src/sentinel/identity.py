"""Appearance verification for persons and objects.

Owner verification compares ``n`` crops of the owner against ``m`` crops of
the candidate. Every pair is scored by the embedding similarity, giving an
``n x m`` matrix; the candidate column that agrees best with all owner crops
on average decides the match.
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Mapping, Optional, Protocol, Sequence, Tuple

import cv2
import numpy as np

from sentinel.core import BBox


@dataclass(frozen=True, eq=False)
class Crop:
    """Image patch cut from one frame, with the ground-truth id when known."""

    pixels: np.ndarray
    frame: int
    box: BBox
    gt_id: Optional[str] = None


class EmbeddingPort(Protocol):
    def embed(self, crop: Crop) -> np.ndarray: ...

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float: ...


class HistogramEmbedder:
    """HSV color histogram (8x8x4 bins), compared by cosine similarity."""

    bins = (8, 8, 4)

    def embed(self, crop: Crop) -> np.ndarray:
        if crop.pixels.size == 0:
            return np.zeros(int(np.prod(self.bins)), np.float32)
        hsv = cv2.cvtColor(np.ascontiguousarray(crop.pixels), cv2.COLOR_RGB2HSV)
        hist = cv2.calcHist([hsv], [0, 1, 2], None, list(self.bins), [0, 180, 0, 256, 0, 256])
        return hist.ravel().astype(np.float32)

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        # histograms are non-negative, so the cosine already lies in [0, 1]
        return float(np.clip(np.dot(u, v) / (nu * nv), 0.0, 1.0))


class OracleEmbedder:
    """Scores 1 for crops of the same ground-truth entity and 0 otherwise."""

    def embed(self, crop: Crop) -> np.ndarray:
        return np.array([crop.gt_id], dtype=object)

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        a, b = u[0], v[0]
        return 1.0 if a is not None and a == b else 0.0


def make_embedder(name: str) -> EmbeddingPort:
    if name == "histogram":
        return HistogramEmbedder()
    if name == "oracle":
        return OracleEmbedder()
    raise ValueError(f"unknown embedder {name!r}")


@dataclass
class SampleSet:
    owner: object
    crops: List[Crop] = field(default_factory=list)
    requested: int = 20

    @property
    def degenerate(self) -> bool:
        return len(self.crops) < self.requested

    def __len__(self) -> int:
        return len(self.crops)


def uniform_targets(first: int, last: int, count: int) -> List[int]:
    if count == 1:
        return [first]
    return [first + int(round(k * (last - first) / (count - 1))) for k in range(count)]


def sample_person(owner, crops: Mapping[int, Crop], count: int = 20) -> SampleSet:
    """Pick ``count`` crops spread evenly in time over the person's lifetime.

    ``crops`` maps frame index to the person's crop in that frame. Each
    uniform target takes the nearest not-yet-used available frame (earlier
    frame on ties); with fewer than ``count`` frames every crop is returned.
    """
    frames = sorted(crops)
    if len(frames) <= count:
        return SampleSet(owner, [crops[f] for f in frames], count)
    arr = np.asarray(frames)
    used = np.zeros(len(arr), bool)
    picked = []
    for target in uniform_targets(frames[0], frames[-1], count):
        dist = np.abs(arr - target).astype(float)
        dist[used] = np.inf
        k = int(np.argmin(dist))
        used[k] = True
        picked.append(k)
    return SampleSet(owner, [crops[frames[k]] for k in sorted(picked)], count)


def similarity_matrix(a: SampleSet, b: SampleSet, emb: EmbeddingPort,
                      executor: Optional[Executor] = None) -> np.ndarray:
    if not a.crops or not b.crops:
        raise ValueError("similarity_matrix needs non-empty sample sets")
    crops = list(a.crops) + list(b.crops)
    feats = list(executor.map(emb.embed, crops)) if executor is not None else [emb.embed(c) for c in crops]
    fa, fb = feats[:len(a.crops)], feats[len(a.crops):]
    m = np.empty((len(fa), len(fb)))
    for i, u in enumerate(fa):
        for j, v in enumerate(fb):
            m[i, j] = emb.similarity(u, v)
    return m


def verify(m: np.ndarray, threshold: float = 0.5) -> Tuple[bool, float]:
    """Best column mean of the owner x candidate matrix against ``threshold``.

    Column sums are taken in exact rational arithmetic so the score does not
    depend on row order or on numpy's summation strategy.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        raise ValueError("verify needs a non-empty matrix")
    best = max(sum(map(Fraction, col)) for col in m.T.tolist())
    score = float(best / m.shape[0])
    return score > threshold, score


def verify_object(a: Crop, b: Crop, emb: EmbeddingPort, threshold: float = 0.5) -> Tuple[bool, float]:
    if a.pixels.size == 0 or b.pixels.size == 0:
        raise ValueError("verify_object needs non-empty crops")
    score = emb.similarity(emb.embed(a), emb.embed(b))
    return score > threshold, score


def verify_sets(a: SampleSet, b: SampleSet, emb: EmbeddingPort, threshold: float = 0.5,
                executor: Optional[Executor] = None) -> Tuple[bool, float]:
    return verify(similarity_matrix(a, b, emb, executor), threshold)
