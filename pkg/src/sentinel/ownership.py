"""Owner assignment for new static objects and the two abandonment rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Set

from sentinel.config import OwnershipConfig
from sentinel.core import BBox, Clock, centroid_distance
from sentinel.tracker import Trace, trace_window


@dataclass
class PersonRecord:
    person_id: int
    trace: Trace
    owner_of: Set[int] = field(default_factory=set)
    candidate_of: Set[int] = field(default_factory=set)
    suspect: bool = False

    @property
    def present(self) -> bool:
        return self.trace.alive

    @property
    def last_seen(self) -> int:
        return self.trace.last_seen

    def make_owner(self, oid: int) -> None:
        self.candidate_of.discard(oid)
        self.owner_of.add(oid)

    def make_candidate(self, oid: int) -> None:
        if oid not in self.owner_of:
            self.candidate_of.add(oid)


def in_edge_band(box: BBox, width: int, height: int, margin: int) -> bool:
    return box.x < margin or box.y < margin or box.x2 > width - margin or box.y2 > height - margin


def assign_owner(box: BBox, traces: Iterable[Trace], now: int, cfg: Optional[OwnershipConfig] = None,
                 fps: float = 25.0) -> Optional[int]:
    """Person whose trace stayed closest to ``box`` on average over the last window.

    Only samples within ``[now - window, now]`` count. Ties go to the lowest id.
    """
    cfg = cfg or OwnershipConfig()
    t = now / fps
    best = None
    for tr in sorted(traces, key=lambda tr: tr.person_id):
        window = trace_window(tr, t - cfg.window_s, t, fps)
        if not window:
            continue
        mean = sum(centroid_distance(box, s.point) for s in window) / len(window)
        if best is None or mean < best[0]:
            best = (mean, tr.person_id)
    return None if best is None else best[1]


def check_abandonment(first_seen: int, owner: Optional[PersonRecord], now: int, width: int, height: int,
                      cfg: Optional[OwnershipConfig] = None, fps: float = 25.0) -> Optional[str]:
    """Reason the object counts as abandoned at ``now``, or None.

    Rule 1: the owner's track has ended and its last position touched the edge
    band. Rule 2: the owner has not been seen for longer than the timeout.
    """
    cfg = cfg or OwnershipConfig()
    timeout = Clock(fps).frames(cfg.abandon_timeout_s)
    if owner is None:
        if cfg.ownerless_abandon and now - first_seen > timeout:
            return "no owner"
        return None
    if not owner.present and in_edge_band(owner.trace.last.box, width, height, cfg.edge_margin(width, height)):
        return "owner left (edge)"
    if now - owner.last_seen > timeout:
        return "owner left (absent)"
    return None


class AbandonmentMonitor:
    """Latches abandonment per object so each object alarms once."""

    def __init__(self, width: int, height: int, cfg: Optional[OwnershipConfig] = None, fps: float = 25.0):
        self.width, self.height = width, height
        self.cfg = cfg or OwnershipConfig()
        self.fps = fps
        self.latched: Dict[int, int] = {}

    def update(self, oid: int, first_seen: int, owner: Optional[PersonRecord], now: int) -> Optional[str]:
        """Reason string the first time the object becomes abandoned, else None."""
        if oid in self.latched:
            return None
        why = check_abandonment(first_seen, owner, now, self.width, self.height, self.cfg, self.fps)
        if why is not None:
            self.latched[oid] = now
        return why

    def is_abandoned(self, oid: int) -> bool:
        return oid in self.latched

    def reset(self, oid: int) -> None:
        self.latched.pop(oid, None)
