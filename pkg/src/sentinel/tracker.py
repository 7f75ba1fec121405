"""Tracking-by-detection for persons: Kalman prediction plus optimal IoU assignment.

Each track keeps a constant-velocity Kalman filter over ``(cx, cy, area,
aspect)`` in the usual SORT layout. Detections are assigned to predicted boxes
by maximizing total IoU, and every track writes the detections it receives
into a :class:`Trace`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from sentinel.config import TrackConfig
from sentinel.core import BBox, Point, iou


@dataclass(frozen=True)
class TraceSample:
    frame: int
    point: Point
    box: BBox


@dataclass
class Trace:
    person_id: int
    samples: List[TraceSample] = field(default_factory=list)
    alive: bool = True

    def add(self, frame: int, box: BBox) -> None:
        if self.samples and frame <= self.samples[-1].frame:
            raise ValueError(f"trace {self.person_id}: frame {frame} not after {self.samples[-1].frame}")
        self.samples.append(TraceSample(frame, box.center, box))

    @property
    def first_seen(self) -> int:
        return self.samples[0].frame

    @property
    def last_seen(self) -> int:
        return self.samples[-1].frame

    @property
    def last(self) -> TraceSample:
        return self.samples[-1]


def trace_window(trace: Trace, from_t: float, to_t: float, fps: float = 25.0) -> List[TraceSample]:
    """Samples whose timestamps fall in ``[from_t, to_t]`` seconds."""
    if from_t > to_t:
        raise ValueError("trace_window: from_t > to_t")
    lo, hi = from_t * fps - 1e-9, to_t * fps + 1e-9
    return [s for s in trace.samples if lo <= s.frame <= hi]


def box_to_z(box: BBox) -> np.ndarray:
    cx, cy = box.center
    return np.array([cx, cy, float(box.area), box.w / float(box.h)])


def x_to_box(x: np.ndarray) -> Optional[BBox]:
    s, r = float(x[2]), float(x[3])
    if s <= 0 or r <= 0:
        return None
    w = math.sqrt(s * r)
    h = s / w
    return BBox(int(round(x[0] - w / 2)), int(round(x[1] - h / 2)), max(1, int(round(w))), max(1, int(round(h))))


class KalmanTrack:
    """Constant-velocity filter; state (cx, cy, s, r, vcx, vcy, vs)."""

    F = np.eye(7)
    F[0, 4] = F[1, 5] = F[2, 6] = 1.0
    H = np.eye(4, 7)
    R = np.diag([1.0, 1.0, 10.0, 10.0])
    Q = np.diag([1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1e-4])

    def __init__(self, track_id: int, box: BBox):
        self.id = track_id
        self.x = np.zeros(7)
        self.x[:4] = box_to_z(box)
        self.P = np.diag([10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4])
        self.age = 0
        self.hits = 1
        self.hit_streak = 1
        self.misses = 0
        self.confirmed = False
        self.last_box = box

    def predict(self) -> Optional[BBox]:
        if self.x[2] + self.x[6] <= 0:
            self.x[6] = 0.0
        self.x = self.F @ self.x
        self.P = self.F @ self.P @ self.F.T + self.Q
        self.age += 1
        if self.misses > 0:
            self.hit_streak = 0
        self.misses += 1
        return x_to_box(self.x)

    def update(self, box: BBox) -> None:
        z = box_to_z(box)
        y = z - self.H @ self.x
        S = self.H @ self.P @ self.H.T + self.R
        K = self.P @ self.H.T @ np.linalg.inv(S)
        self.x = self.x + K @ y
        self.P = (np.eye(7) - K @ self.H) @ self.P
        self.misses = 0
        self.hits += 1
        self.hit_streak += 1
        self.last_box = box

    @property
    def box(self) -> BBox:
        return x_to_box(self.x) or self.last_box


def associate(dets: Sequence[BBox], preds: Sequence[Optional[BBox]], iou_min: float):
    """Maximum-total-IoU matching restricted to pairs with IoU >= ``iou_min``.

    Returns ``(matches, unmatched_dets, unmatched_preds)`` with matches as
    ``(det_index, pred_index)`` pairs.
    """
    if not dets or not preds:
        return [], list(range(len(dets))), list(range(len(preds)))
    m = np.zeros((len(dets), len(preds)))
    for i, d in enumerate(dets):
        for j, p in enumerate(preds):
            if p is not None:
                v = iou(d, p)
                m[i, j] = v if v >= iou_min else 0.0
    rows, cols = linear_sum_assignment(m, maximize=True)
    matches = [(int(i), int(j)) for i, j in zip(rows, cols) if m[i, j] > 0.0]
    md = {i for i, _ in matches}
    mp = {j for _, j in matches}
    return matches, [i for i in range(len(dets)) if i not in md], [j for j in range(len(preds)) if j not in mp]


class Tracker:
    def __init__(self, cfg: Optional[TrackConfig] = None):
        self.cfg = cfg or TrackConfig()
        self.tracks: List[KalmanTrack] = []
        self.traces: Dict[int, Trace] = {}
        self._next_id = 1
        self.died: List[int] = []  # ids deleted during the last step

    def step(self, dets: Sequence, index: int) -> List[KalmanTrack]:
        """Advance one frame with this frame's person detections (or boxes)."""
        boxes = [d.box if hasattr(d, "box") else d for d in dets]
        preds = [t.predict() for t in self.tracks]
        matches, free_dets, _ = associate(boxes, preds, self.cfg.iou_min)
        for di, ti in matches:
            t = self.tracks[ti]
            t.update(boxes[di])
            self.traces[t.id].add(index, boxes[di])
            if t.hits >= self.cfg.min_hits:
                t.confirmed = True
        for di in free_dets:
            t = KalmanTrack(self._next_id, boxes[di])
            self._next_id += 1
            t.confirmed = self.cfg.min_hits <= 1
            self.tracks.append(t)
            self.traces[t.id] = Trace(t.id)
            self.traces[t.id].add(index, boxes[di])
        self.died = []
        keep = []
        for t in self.tracks:
            if t.misses > self.cfg.max_age:
                self.traces[t.id].alive = False
                self.died.append(t.id)
            else:
                keep.append(t)
        self.tracks = keep
        return self.tracks

    def matched_box(self, track_id: int, index: int) -> Optional[BBox]:
        tr = self.traces.get(track_id)
        if tr is not None and tr.samples and tr.last_seen == index:
            return tr.last.box
        return None

    def confirmed(self) -> List[KalmanTrack]:
        return [t for t in self.tracks if t.confirmed]

    def is_confirmed(self, track_id: int) -> bool:
        return any(t.id == track_id and t.confirmed for t in self.tracks) or \
            (track_id in self.traces and len(self.traces[track_id].samples) >= self.cfg.min_hits)
