"""Frame loop tying background, detection, tracking and the event engine together."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional

from sentinel.background import DualBackground, Which, cleanup
from sentinel.config import Config
from sentinel.core import BBox, Frame, iou
from sentinel.events import EventEngine, SecurityEvent
from sentinel.identity import make_embedder
from sentinel.perception import DetectorPort, detect_persons
from sentinel.tracker import Tracker

log = logging.getLogger(__name__)


class Pipeline:
    def __init__(self, cfg: Config, width: int, height: int, fps: float, detector: DetectorPort,
                 threads: int = 1):
        cfg.validate()
        self.cfg = cfg
        self.fps = fps
        self.bg = DualBackground(width, height, cfg.bg)
        self.tracker = Tracker(cfg.track)
        self.executor = ThreadPoolExecutor(threads) if threads > 1 else None
        self.engine = EventEngine(cfg, width, height, fps, detector, make_embedder(cfg.identity.embedder),
                                  self.executor)
        self.detector = detector
        self.frames = 0

    def process(self, frame: Frame) -> List[SecurityEvent]:
        self.bg.ingest(frame)
        f_long = cleanup(self.bg.foreground(frame, Which.LONG))
        f_short = cleanup(self.bg.foreground(frame, Which.SHORT))
        if self.frames == 0:
            self.engine.register_background(self.bg.background_image(frame.index))
        persons = detect_persons(self.detector, frame)
        self.tracker.step(persons, frame.index)
        self.frames += 1
        return self.engine.step(frame, f_long, f_short, persons, self.tracker)

    def run(self, frames: Iterable[Frame]) -> List[SecurityEvent]:
        try:
            for frame in frames:
                self.process(frame)
        finally:
            if self.executor is not None:
                self.executor.shutdown()
        return self.events

    @property
    def events(self) -> List[SecurityEvent]:
        return sorted(self.engine.events, key=SecurityEvent.sort_key)


def resolve_ids(pipe: Pipeline, timeline, min_iou: float = 0.3):
    """Map internal object/track ids to scenario entity ids by box overlap.

    Objects take the entity whose box best overlaps theirs when first seen;
    tracks take the person entity they overlapped in most of their samples.
    Ids that cannot be matched are kept as ``obj#N`` / ``track#N``.
    """
    objects: Dict[int, str] = {}
    for oid, (first, box) in pipe.engine.history.items():
        best = _best_match(box, [tb for tb in timeline.truth(first) if tb.category != "person"], min_iou)
        objects[oid] = best if best is not None else f"obj#{oid}"
    persons: Dict[int, str] = {}
    for tid, trace in pipe.tracker.traces.items():
        votes: Dict[str, int] = {}
        for s in trace.samples:
            m = _best_match(s.box, [tb for tb in timeline.truth(s.frame) if tb.category == "person"], min_iou)
            if m is not None:
                votes[m] = votes.get(m, 0) + 1
        persons[tid] = min(votes, key=lambda k: (-votes[k], k)) if votes else f"track#{tid}"
    return objects, persons


def _best_match(box: BBox, truths, min_iou: float) -> Optional[str]:
    best = None
    for tb in truths:
        v = iou(box, tb.box)
        if v >= min_iou and (best is None or v > best[0]):
            best = (v, tb.entity_id)
    return None if best is None else best[1]


def label_events(events: Iterable[SecurityEvent], objects: Dict[int, str], persons: Dict[int, str]) -> List[SecurityEvent]:
    out = []
    for e in events:
        oid = objects.get(e.object_id, f"obj#{e.object_id}")
        pid = None if e.person_id is None else persons.get(e.person_id, f"track#{e.person_id}")
        out.append(SecurityEvent(e.frame, e.kind, oid, pid, e.score, e.detail))
    return out


def raw_labels(events: Iterable[SecurityEvent]) -> List[SecurityEvent]:
    return label_events(events, {}, {})


def run_scenario(sc, cfg: Optional[Config] = None, seed: int = 0, threads: int = 1, detector=None):
    """Render and process a whole scenario; returns (labelled events, pipeline).

    Exit regions declared by the scenario are used unless the config names its own.
    """
    from sentinel.perception import mock_detector
    from sentinel.scenario import Renderer

    cfg = cfg or Config()
    if not cfg.ev.exit_regions and sc.exits:
        cfg.ev.exit_regions = [tuple(r) for r in sc.exits]
    if detector is None:
        detector = mock_detector(sc, cfg.mock, seed, cfg.det.categories)
    pipe = Pipeline(cfg, sc.width, sc.height, sc.fps, detector, threads)
    pipe.run(Renderer(sc))
    objects, persons = resolve_ids(pipe, sc.timeline)
    return label_events(pipe.events, objects, persons), pipe
