"""Security-event state machine.

Objects in BO/SO are watched through the short-term foreground. When one
moves, the closest person becomes the candidate (CP). For a deposited object
the candidate is compared with the owner: the owner taking it closes the
case, anyone else gets a warning and stays under watch until they either set
the object down elsewhere (relocation) or leave with it (theft).
"""

from __future__ import annotations

import enum
import json
import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sentinel.background import ObjectMotionState, classify_motion
from sentinel.config import Config
from sentinel.core import BBox, Clock, Frame, Mask, centroid_distance, iou
from sentinel.identity import Crop, EmbeddingPort, sample_person, verify_object, verify_sets
from sentinel.ownership import AbandonmentMonitor, PersonRecord, assign_owner, in_edge_band
from sentinel.perception import (PERSON, DetectorPort, Detection, ObjectRecord, Registries, Registry,
                                 StaticConfirmer, detect_persons, is_duplicate, register_background_objects,
                                 static_candidates)
from sentinel.tracker import Tracker

log = logging.getLogger(__name__)


class EventKind(str, enum.Enum):
    ABANDONED = "ObjectAbandoned"
    MOVED_BY_OWNER = "MovedByOwner"
    MOVED_BY_NON_OWNER = "MovedByNonOwner"
    RELOCATED = "ObjectRelocated"
    THEFT = "Theft"
    SUSPECT_BACKGROUND = "SuspectBackgroundObject"
    WARNING = "Warning"

    def __str__(self) -> str:
        return self.value


_ORDER = {k: i for i, k in enumerate(EventKind)}


@dataclass(frozen=True)
class SecurityEvent:
    frame: int
    kind: EventKind
    object_id: object
    person_id: object = None
    score: Optional[float] = None
    detail: str = ""

    def sort_key(self):
        return (self.frame, _ORDER[self.kind], str(self.object_id))

    def to_record(self, fps: float = 25.0) -> dict:
        return {
            "frame": self.frame,
            "time_s": round(self.frame / fps, 3),
            "kind": self.kind.value,
            "object_id": self.object_id,
            "person_id": self.person_id,
            "score": None if self.score is None else round(float(self.score), 4),
            "detail": self.detail,
        }

    def to_json(self, fps: float = 25.0) -> str:
        return json.dumps(self.to_record(fps))

    @classmethod
    def from_record(cls, r: dict) -> "SecurityEvent":
        return cls(int(r["frame"]), EventKind(r["kind"]), r.get("object_id"), r.get("person_id"),
                   r.get("score"), r.get("detail", ""))


def write_events(path, events: Sequence[SecurityEvent], fps: float = 25.0) -> None:
    with open(path, "w") as fh:
        for e in events:
            fh.write(e.to_json(fps) + "\n")


def read_events(path) -> List[SecurityEvent]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(SecurityEvent.from_record(json.loads(line)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad event record ({exc})") from exc
    return out


class MoveResult(enum.Enum):
    UNCHANGED = "Unchanged"
    MOVED = "Moved"


@dataclass
class WatchEntry:
    mo: ObjectRecord
    cp: Optional[int]
    opened: int
    resolved: bool = False
    cp_crops_at_verify: int = 0


def motion_trigger(box: BBox, f_short: Mask, tau_move: float = 0.3) -> bool:
    return f_short.coverage(box) > tau_move


def classify_move(obj: ObjectRecord, redetect: Sequence[Detection], iou_keep: float = 0.5) -> MoveResult:
    for d in redetect:
        if d.category == obj.category and iou(d.box, obj.box) >= iou_keep:
            return MoveResult.UNCHANGED
    return MoveResult.MOVED


def closest_person(box: BBox, persons: Dict[int, PersonRecord]) -> Optional[int]:
    best = None
    for pid in sorted(persons):
        d = centroid_distance(box, persons[pid].trace.last.point)
        if best is None or d < best[0]:
            best = (d, pid)
    return None if best is None else best[1]


def theft_check(w: WatchEntry, cp: PersonRecord, now: int, exit_regions: Sequence[BBox], width: int,
                height: int, edge_margin: int, timeout_frames: int) -> Optional[str]:
    """Why the candidate counts as having left with the object, or None."""
    last = cp.trace.last
    if cp.present:
        if last.frame == now and any(r.contains(last.point) for r in exit_regions):
            return "left through exit region"
        return None
    if in_edge_band(last.box, width, height, edge_margin):
        return "left the scene"
    if now - last.frame > timeout_frames:
        return "track lost"
    return None


class EventEngine:
    """Per-frame reducer from detections, tracks and masks to security events."""

    def __init__(self, cfg: Config, width: int, height: int, fps: float, detector: DetectorPort,
                 embedder: EmbeddingPort, executor: Optional[Executor] = None):
        self.cfg = cfg
        self.width, self.height, self.fps = width, height, fps
        self.detector = detector
        self.embedder = embedder
        self.executor = executor
        self.registries = Registries()
        self.persons: Dict[int, PersonRecord] = {}
        self.crops: Dict[int, Dict[int, Crop]] = {}
        self.watches: Dict[int, WatchEntry] = {}
        self.events: List[SecurityEvent] = []
        self.monitor = AbandonmentMonitor(width, height, cfg.own, fps)
        self.confirmer = StaticConfirmer(cfg.det)
        self.move_counts: Dict[int, int] = {}
        self.history: Dict[int, Tuple[int, BBox]] = {}
        self.exit_regions = [BBox(*r) for r in cfg.ev.exit_regions]
        self.edge_margin = cfg.own.edge_margin(width, height)
        self.timeout_frames = Clock(fps).frames(cfg.own.abandon_timeout_s)

    # -- bookkeeping -------------------------------------------------------------

    def emit(self, frame: int, kind: EventKind, oid, pid=None, score=None, detail="") -> SecurityEvent:
        ev = SecurityEvent(frame, kind, oid, pid, score, detail)
        self.events.append(ev)
        log.info("frame %d: %s object=%s person=%s %s", frame, kind.value, oid, pid, detail)
        return ev

    def _remember(self, rec: ObjectRecord) -> None:
        self.history.setdefault(rec.id, (rec.first_seen, rec.box))

    def register_background(self, bg_image: Frame) -> List[ObjectRecord]:
        recs = register_background_objects(self.detector, bg_image, self.registries, self.cfg.det)
        for r in recs:
            self._remember(r)
        return recs

    def observe_persons(self, frame: Frame, dets: Sequence[Detection], tracker: Tracker) -> None:
        """Record this frame's crop for every track that received a detection."""
        by_box = {d.box: d for d in dets}
        for t in tracker.tracks:
            box = tracker.matched_box(t.id, frame.index)
            if box is None:
                continue
            d = by_box.get(box)
            self.crops.setdefault(t.id, {})[frame.index] = Crop(frame.crop(box), frame.index, box,
                                                                d.gt_id if d is not None else None)
            if t.confirmed and t.id not in self.persons:
                self.persons[t.id] = PersonRecord(t.id, tracker.traces[t.id])

    def visible_persons(self, now: int) -> Dict[int, PersonRecord]:
        return {pid: p for pid, p in self.persons.items() if p.present and p.last_seen >= now - 1}

    def samples(self, pid: int):
        return sample_person(pid, self.crops.get(pid, {}), self.cfg.identity.samples)

    # -- motion -------------------------------------------------------------------

    def check_motion(self, frame: Frame, f_short: Mask) -> None:
        ev = self.cfg.ev
        for rec in list(self.registries.active()):
            if not motion_trigger(rec.box, f_short, ev.tau_move):
                self.move_counts.pop(rec.id, None)
                continue
            roi = rec.box.dilate(self.cfg.det.roi_margin, self.width, self.height)
            result = classify_move(rec, self.detector.detect(frame, roi), ev.iou_keep)
            if result is MoveResult.UNCHANGED:
                self.move_counts.pop(rec.id, None)
                continue
            n = self.move_counts.get(rec.id, 0) + 1
            self.move_counts[rec.id] = n
            if n >= ev.move_confirm_frames:
                self.move_counts.pop(rec.id, None)
                self.open_watch(rec, frame.index)

    def open_watch(self, mo: ObjectRecord, now: int) -> WatchEntry:
        mo.origin = mo.registry
        mo.registry = Registry.MOVED
        mo.last_seen = now
        cp = closest_person(mo.box, self.visible_persons(now))
        w = WatchEntry(mo, cp, now)
        if cp is None:
            self.emit(now, EventKind.WARNING, mo.id, None, detail="object moved with nobody around")
            self.watches[mo.id] = w
            return w
        person = self.persons[cp]
        if mo.origin is Registry.BACKGROUND:
            person.suspect = True
            self.emit(now, EventKind.SUSPECT_BACKGROUND, mo.id, cp, detail="scene object moved")
            w.resolved = True
            return w
        person.make_candidate(mo.id)
        self.watches[mo.id] = w
        self.resolve_by_owner_verification(w, now)
        return w

    def resolve_by_owner_verification(self, w: WatchEntry, now: int, again: bool = False) -> Optional[SecurityEvent]:
        mo, cp = w.mo, w.cp
        owner = self.persons.get(mo.owner_id) if mo.owner_id is not None else None
        cp_set = self.samples(cp)
        w.cp_crops_at_verify = len(self.crops.get(cp, {}))
        same, score = False, 0.0
        if owner is not None and mo.owner_id == cp:
            same, score = True, 1.0
        elif owner is not None and self.crops.get(owner.person_id) and len(cp_set):
            same, score = verify_sets(self.samples(owner.person_id), cp_set, self.embedder,
                                      self.cfg.identity.threshold, self.executor)
        if same:
            self.emit(now, EventKind.MOVED_BY_OWNER, mo.id, cp, score, "owner took the object")
            self.close_watch(w)
            self.registries.remove(mo.id)
            self.monitor.reset(mo.id)
            return self.events[-1]
        if again:
            return None
        return self.emit(now, EventKind.MOVED_BY_NON_OWNER, mo.id, cp, score, "warning: object does not belong to the person")

    def close_watch(self, w: WatchEntry) -> None:
        w.resolved = True
        self.watches.pop(w.mo.id, None)
        p = self.persons.get(w.cp) if w.cp is not None else None
        if p is not None:
            p.candidate_of.discard(w.mo.id)

    # -- watches ----------------------------------------------------------------------

    def update_watches(self, now: int) -> None:
        growth = self.cfg.identity.reverify_growth
        for w in list(self.watches.values()):
            if w.cp is None:
                continue
            cp = self.persons[w.cp]
            n = len(self.crops.get(w.cp, {}))
            if cp.present and w.cp_crops_at_verify < self.cfg.identity.samples and n >= w.cp_crops_at_verify + growth:
                if self.resolve_by_owner_verification(w, now, again=True) is not None:
                    continue
            why = theft_check(w, cp, now, self.exit_regions, self.width, self.height, self.edge_margin,
                              self.timeout_frames)
            if why is not None:
                self.emit(now, EventKind.THEFT, w.mo.id, w.cp, detail=why)
                cp.suspect = True
                self.close_watch(w)

    # -- new static objects ----------------------------------------------------------------

    def detect_static(self, frame: Frame, f_long: Mask, f_short: Mask) -> None:
        static = f_long & ~f_short
        existing = [r.box for r in self.registries.active()]
        dets = static_candidates(self.detector, frame, static, existing, self.cfg.det, f_long, f_short,
                                 self.cfg.bg.coverage_threshold)
        for d in self.confirmer.update(dets, frame.index):
            if is_duplicate(d.box, [r.box for r in self.registries.active()], self.cfg.det.dedup_iou):
                continue
            crop = Crop(frame.crop(d.box), frame.index, d.box, d.gt_id)
            if self.match_reappearance(d, crop, frame.index) is None:
                rec = self.registries.add(d.category, d.box, Registry.STATIC, crop, frame.index)
                self._remember(rec)
                traces = [p.trace for p in self.persons.values()]
                rec.owner_id = assign_owner(rec.box, traces, frame.index, self.cfg.own, self.fps)
                if rec.owner_id is not None:
                    self.persons[rec.owner_id].make_owner(rec.id)
                log.debug("frame %d: new static %s #%d owner=%s", frame.index, rec.category, rec.id, rec.owner_id)

    def match_reappearance(self, d: Detection, crop: Crop, now: int) -> Optional[SecurityEvent]:
        best = None
        for w in sorted(self.watches.values(), key=lambda w: w.opened):
            if w.cp is None:
                continue
            same, score = verify_object(crop, w.mo.crop, self.embedder, self.cfg.identity.threshold)
            if same and (best is None or score > best[0]):
                best = (score, w)
        if best is None:
            return None
        score, w = best
        mo = w.mo
        mo.registry = Registry.STATIC
        mo.box, mo.crop, mo.category = d.box, crop, d.category
        mo.last_seen = now
        mo.owner_id = w.cp
        self.persons[w.cp].make_owner(mo.id)
        self.monitor.reset(mo.id)
        self.close_watch(w)
        return self.emit(now, EventKind.RELOCATED, mo.id, w.cp, score, "moved to a new place")

    # -- abandonment -----------------------------------------------------------------------

    def check_abandonment(self, now: int) -> None:
        for rec in self.registries.static:
            owner = self.persons.get(rec.owner_id) if rec.owner_id is not None else None
            why = self.monitor.update(rec.id, rec.first_seen, owner, now)
            if why is not None:
                self.emit(now, EventKind.ABANDONED, rec.id, rec.owner_id, detail=why)

    # -- driver ---------------------------------------------------------------------------------

    def step(self, frame: Frame, f_long: Mask, f_short: Mask, person_dets: Sequence[Detection],
             tracker: Tracker) -> List[SecurityEvent]:
        start = len(self.events)
        self.observe_persons(frame, person_dets, tracker)
        self.check_motion(frame, f_short)
        self.update_watches(frame.index)
        self.detect_static(frame, f_long, f_short)
        self.check_abandonment(frame.index)
        return self.events[start:]
