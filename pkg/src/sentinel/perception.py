"""Object and person detection, and the object registries.

The detector itself is pluggable (:class:`DetectorPort`). Object detection is
run only inside static foreground regions; persons are detected on the whole
frame every frame.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Tuple

import cv2
import numpy as np

from sentinel.background import ObjectMotionState, classify_motion
from sentinel.config import DetectionConfig, MockConfig
from sentinel.core import BBox, Frame, Mask, iou
from sentinel.identity import Crop

log = logging.getLogger(__name__)

PERSON = "person"
MIN_COMPONENT_AREA = 12  # px


@dataclass(frozen=True)
class Detection:
    category: str
    box: BBox
    score: float = 1.0
    gt_id: Optional[str] = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


class Registry(enum.Enum):
    BACKGROUND = "Background"
    STATIC = "Static"
    MOVED = "Moved"


@dataclass
class ObjectRecord:
    id: int
    category: str
    box: BBox
    registry: Registry
    crop: Crop
    first_seen: int
    last_seen: int
    owner_id: Optional[int] = None
    origin: Registry = Registry.STATIC  # registry before the object was moved

    @property
    def gt_id(self) -> Optional[str]:
        return self.crop.gt_id


class DetectorPort(Protocol):
    def detect(self, frame: Frame, roi: Optional[BBox] = None) -> List[Detection]: ...


def in_roi(box: BBox, roi: Optional[BBox]) -> bool:
    """A box belongs to a region when at least half of it lies inside."""
    return roi is None or 2 * box.intersection(roi) >= box.area


class Registries:
    """BO, SO and MO lists as one id-keyed table; each record is in exactly one."""

    def __init__(self):
        self.records: Dict[int, ObjectRecord] = {}
        self._next = 1

    def add(self, category: str, box: BBox, registry: Registry, crop: Crop, frame: int) -> ObjectRecord:
        rec = ObjectRecord(self._next, category, box, registry, crop, frame, frame, origin=registry)
        self.records[rec.id] = rec
        self._next += 1
        return rec

    def remove(self, oid: int) -> None:
        self.records.pop(oid, None)

    def get(self, oid: int) -> Optional[ObjectRecord]:
        return self.records.get(oid)

    def of(self, registry: Registry) -> List[ObjectRecord]:
        return [r for r in self.records.values() if r.registry is registry]

    @property
    def background(self) -> List[ObjectRecord]:
        return self.of(Registry.BACKGROUND)

    @property
    def static(self) -> List[ObjectRecord]:
        return self.of(Registry.STATIC)

    @property
    def moved(self) -> List[ObjectRecord]:
        return self.of(Registry.MOVED)

    def active(self) -> List[ObjectRecord]:
        """Objects still believed to be in place (BO and SO)."""
        return [r for r in self.records.values() if r.registry is not Registry.MOVED]


def register_background_objects(detector: DetectorPort, bg_image: Frame, registries: Registries,
                                cfg: Optional[DetectionConfig] = None) -> List[ObjectRecord]:
    cfg = cfg or DetectionConfig()
    out = []
    for d in detector.detect(bg_image):
        if d.category == PERSON or d.category not in cfg.categories:
            continue
        crop = Crop(bg_image.crop(d.box), bg_image.index, d.box, d.gt_id)
        out.append(registries.add(d.category, d.box, Registry.BACKGROUND, crop, bg_image.index))
    return out


def mask_regions(mask: Mask, margin: int, min_area: int = MIN_COMPONENT_AREA) -> List[BBox]:
    """Bounding boxes of the mask's 8-connected components, dilated by ``margin``."""
    n, _, stats, _ = cv2.connectedComponentsWithStats(mask.bits.astype(np.uint8), connectivity=8)
    rois = []
    for k in range(1, n):
        x, y, w, h, area = (int(v) for v in stats[k])
        if area < min_area:
            continue
        rois.append(BBox(x, y, w, h).dilate(margin, mask.width, mask.height))
    return rois


def static_candidates(detector: DetectorPort, frame: Frame, static_mask: Mask, existing: Sequence[BBox] = (),
                      cfg: Optional[DetectionConfig] = None, f_long: Optional[Mask] = None,
                      f_short: Optional[Mask] = None, coverage_threshold: float = 0.5) -> List[Detection]:
    """Non-person detections inside static regions not already registered.

    When the foreground masks are given, a detection is kept only if its own
    box classifies as Static, which filters out objects that merely share a
    region with static foreground.
    """
    cfg = cfg or DetectionConfig()
    if not static_mask.any():
        return []
    found: List[Detection] = []
    for roi in mask_regions(static_mask, cfg.roi_margin):
        for d in detector.detect(frame, roi):
            if d.category == PERSON or d.category not in cfg.categories:
                continue
            if f_long is not None and f_short is not None and \
                    classify_motion(d.box, f_long, f_short, coverage_threshold) is not ObjectMotionState.STATIC:
                continue
            if is_duplicate(d.box, existing, cfg.dedup_iou):
                continue
            if any(iou(d.box, f.box) >= cfg.dedup_iou for f in found):
                continue
            found.append(d)
    return found


def detect_static_objects(detector: DetectorPort, frame: Frame, static_mask: Mask, registries: Registries,
                          cfg: Optional[DetectionConfig] = None) -> List[ObjectRecord]:
    """Register every new static detection at once (no confirmation)."""
    existing = [r.box for r in registries.active()]
    out = []
    for d in static_candidates(detector, frame, static_mask, existing, cfg):
        crop = Crop(frame.crop(d.box), frame.index, d.box, d.gt_id)
        out.append(registries.add(d.category, d.box, Registry.STATIC, crop, frame.index))
    return out


@dataclass
class _Pending:
    det: Detection
    hits: int
    seen: int
    boxes: List[BBox] = field(default_factory=list)


def median_box(boxes: Sequence[BBox]) -> BBox:
    a = np.median(np.array([b.as_tuple() for b in boxes], float), axis=0)
    return BBox(*(int(np.floor(v + 0.5)) for v in a))


def is_duplicate(box: BBox, existing: Iterable[BBox], dedup_iou: float) -> bool:
    """Same object as a registered box: enough overlap, or centered inside it."""
    return any(iou(box, b) >= dedup_iou or b.contains(box.center) for b in existing)


class StaticConfirmer:
    """Holds static detections until they have been seen on consecutive frames.

    A confirmed detection is reported with the median of its boxes over those frames.
    """

    def __init__(self, cfg: Optional[DetectionConfig] = None):
        self.cfg = cfg or DetectionConfig()
        self.pending: List[_Pending] = []

    def update(self, dets: Sequence[Detection], index: int) -> List[Detection]:
        nxt, ready = [], []
        for d in dets:
            prev = max((p for p in self.pending if p.det.category == d.category and iou(p.det.box, d.box) >= self.cfg.dedup_iou),
                       key=lambda p: iou(p.det.box, d.box), default=None)
            if prev is not None and prev.seen == index - 1:
                hits, boxes = prev.hits + 1, prev.boxes + [d.box]
            else:
                hits, boxes = 1, [d.box]
            if hits >= self.cfg.confirm_frames:
                ready.append(Detection(d.category, median_box(boxes), d.score, d.gt_id))
            else:
                nxt.append(_Pending(d, hits, index, boxes))
        self.pending = nxt
        return ready


def detect_persons(detector: DetectorPort, frame: Frame) -> List[Detection]:
    return [d for d in detector.detect(frame) if d.category == PERSON]


class MockDetector:
    """Ground-truth detector with optional uniform jitter, misses and false positives.

    ``truth`` is anything with a ``truth(index)`` method returning boxes with
    ``entity_id``, ``category``, ``box`` and ``in_view`` (a scenario timeline).
    The noise stream is seeded from ``(seed, frame index, roi)``, so results do
    not depend on call order.
    """

    def __init__(self, truth, noise: Optional[MockConfig] = None, seed: int = 0,
                 categories: Sequence[str] = DetectionConfig.categories):
        self.truth = truth
        self.noise = noise or MockConfig()
        self.seed = int(seed)
        self.categories = tuple(categories)
        self.calls = 0

    def detect(self, frame: Frame, roi: Optional[BBox] = None) -> List[Detection]:
        self.calls += 1
        nz = self.noise
        key = [self.seed, frame.index] + (list(roi.as_tuple()) if roi is not None else [-1])
        rng = np.random.default_rng([abs(k) for k in key])
        out = []
        for tb in self.truth.truth(frame.index):
            if not tb.in_view or tb.category not in self.categories or not in_roi(tb.box, roi):
                continue
            if nz.miss_rate and rng.random() < nz.miss_rate:
                continue
            box = tb.box
            if nz.jitter_px:
                dx, dy, dw, dh = (int(v) for v in rng.integers(-nz.jitter_px, nz.jitter_px + 1, 4))
                box = BBox(box.x + dx, box.y + dy, max(1, box.w + dw), max(1, box.h + dh))
                box = box.clamp(frame.width, frame.height) or tb.box
            out.append(Detection(tb.category, box, 1.0, tb.entity_id))
        if nz.fp_rate and rng.random() < nz.fp_rate:
            area = roi or BBox(0, 0, frame.width, frame.height)
            w = int(rng.integers(8, 31))
            h = int(rng.integers(8, 31))
            x = area.x + int(rng.integers(0, max(1, area.w - w + 1)))
            y = area.y + int(rng.integers(0, max(1, area.h - h + 1)))
            box = BBox(x, y, w, h).clamp(frame.width, frame.height)
            if box is not None:
                cat = self.categories[int(rng.integers(len(self.categories)))]
                out.append(Detection(cat, box, 0.5, None))
        return out


def mock_detector(scenario, noise: Optional[MockConfig] = None, seed: int = 0,
                  categories: Sequence[str] = DetectionConfig.categories) -> MockDetector:
    return MockDetector(scenario.timeline, noise, seed, categories)


class RecordedDetector:
    """Replays a recorded detection stream; regions filter the frame's records."""

    def __init__(self, records: Dict[int, List[Detection]]):
        self.records = records
        self.calls = 0

    @classmethod
    def load(cls, path) -> "RecordedDetector":
        return cls(read_detections(path))

    def detect(self, frame: Frame, roi: Optional[BBox] = None) -> List[Detection]:
        self.calls += 1
        return [d for d in self.records.get(frame.index, []) if in_roi(d.box, roi)]


def detection_to_json(index: int, d: Detection) -> str:
    rec = {"frame": index, "category": d.category, "x": d.box.x, "y": d.box.y, "w": d.box.w, "h": d.box.h,
           "score": d.score}
    if d.gt_id is not None:
        rec["gt_entity_id"] = d.gt_id
    return json.dumps(rec, sort_keys=False)


def write_detections(path, stream: Iterable[Tuple[int, Sequence[Detection]]]) -> int:
    n = 0
    with open(path, "w") as fh:
        for index, dets in stream:
            for d in dets:
                fh.write(detection_to_json(index, d) + "\n")
                n += 1
    return n


def read_detections(path) -> Dict[int, List[Detection]]:
    out: Dict[int, List[Detection]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                d = Detection(str(r["category"]), BBox(int(r["x"]), int(r["y"]), int(r["w"]), int(r["h"])),
                              float(r.get("score", 1.0)), r.get("gt_entity_id"))
                out.setdefault(int(r["frame"]), []).append(d)
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad detection record ({exc})") from exc
    return out
