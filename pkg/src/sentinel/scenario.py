"""Scripted synthetic surveillance scenes with exact ground truth.

A scenario is a flat background plus persons and objects drawn as textured
rectangles. Persons follow piecewise-linear paths of ``(time_s, x, y)`` box
centers; objects either start on the floor (``at``) or in a person's hands
(``carrier``) and change hands through ``drop``/``pick`` actions. A carried
object is held against its carrier: it shares the carrier's center and is not
drawn or detectable until dropped.

Rendering, ground-truth boxes and ground-truth events are all derived from one
compiled :class:`Timeline`, so the pixels and the annotations cannot disagree.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from sentinel.config import OwnershipConfig
from sentinel.core import BBox, Clock, Frame
from sentinel.events import EventKind, SecurityEvent
from sentinel.ownership import in_edge_band

PERSON = "person"
OBJECT_CATEGORIES = ("bag", "backpack", "suitcase", "laptop", "box", "monitor")
# an entity with less than this share of its box on screen counts as out of view
MIN_VISIBLE_FRACTION = 0.25
MAX_SPEED = 250.0  # px/s
REACH = 24  # px gap between a person's box and an object they handle

DEFAULT_SIZES = {
    PERSON: (20, 44),
    "bag": (22, 18),
    "backpack": (18, 22),
    "suitcase": (26, 30),
    "laptop": (24, 14),
    "box": (24, 24),
    "monitor": (30, 24),
}


class ScenarioError(ValueError):
    pass


@dataclass
class BackgroundSpec:
    color: Tuple[int, int, int] = (118, 118, 112)
    noise: int = 4
    seed: int = 0
    regions: List[Tuple[Tuple[int, int, int, int], Tuple[int, int, int]]] = field(default_factory=list)


@dataclass
class Entity:
    id: str
    kind: str
    category: str
    size: Tuple[int, int]
    colors: List[Tuple[int, int, int]]
    path: List[Tuple[float, float, float]] = field(default_factory=list)
    hidden: List[Tuple[float, float]] = field(default_factory=list)
    at: Optional[Tuple[float, float]] = None
    carrier: Optional[str] = None
    texture: int = 6

    @property
    def is_person(self) -> bool:
        return self.kind == PERSON


@dataclass
class Action:
    t: float
    person: str
    do: str
    object: str
    at: Optional[Tuple[float, float]] = None


@dataclass
class Scenario:
    name: str
    width: int = 320
    height: int = 240
    fps: float = 25.0
    duration: float = 60.0
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    entities: List[Entity] = field(default_factory=list)
    actions: List[Action] = field(default_factory=list)
    exits: List[Tuple[int, int, int, int]] = field(default_factory=list)
    description: str = ""

    @property
    def n_frames(self) -> int:
        return Clock(self.fps).frames(self.duration)

    @property
    def clock(self) -> Clock:
        return Clock(self.fps)

    def entity(self, eid: str) -> Entity:
        for e in self.entities:
            if e.id == eid:
                return e
        raise KeyError(eid)

    @property
    def persons(self) -> List[Entity]:
        return [e for e in self.entities if e.is_person]

    @property
    def objects(self) -> List[Entity]:
        return [e for e in self.entities if not e.is_person]

    @property
    def exit_boxes(self) -> List[BBox]:
        return [BBox(*r) for r in self.exits]

    @cached_property
    def timeline(self) -> "Timeline":
        validate(self)
        return Timeline(self)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        ents = []
        for e in self.entities:
            d = {"id": e.id, "kind": e.kind, "size": list(e.size), "colors": [list(c) for c in e.colors]}
            if not e.is_person:
                d["category"] = e.category
            if e.path:
                d["path"] = [[_num(v) for v in wp] for wp in e.path]
            if e.hidden:
                d["hidden"] = [[_num(v) for v in h] for h in e.hidden]
            if e.at is not None:
                d["at"] = [_num(v) for v in e.at]
            if e.carrier is not None:
                d["carrier"] = e.carrier
            if e.texture != 6:
                d["texture"] = e.texture
            ents.append(d)
        acts = []
        for a in self.actions:
            d = {"t": _num(a.t), "person": a.person, "do": a.do, "object": a.object}
            if a.at is not None:
                d["at"] = [_num(v) for v in a.at]
            acts.append(d)
        bg = self.background
        return {
            "name": self.name,
            "description": self.description,
            "size": [self.width, self.height],
            "fps": _num(self.fps),
            "duration": _num(self.duration),
            "background": {
                "color": list(bg.color),
                "noise": bg.noise,
                "seed": bg.seed,
                "regions": [{"box": list(b), "color": list(c)} for b, c in bg.regions],
            },
            "exits": [list(r) for r in self.exits],
            "entities": ents,
            "actions": acts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            bgd = d.get("background") or {}
            bg = BackgroundSpec(
                color=tuple(bgd.get("color", BackgroundSpec.color)),
                noise=int(bgd.get("noise", 4)),
                seed=int(bgd.get("seed", 0)),
                regions=[(tuple(r["box"]), tuple(r["color"])) for r in bgd.get("regions", [])],
            )
            ents = []
            for ed in d.get("entities", []):
                kind = ed["kind"]
                category = PERSON if kind == PERSON else ed["category"]
                ents.append(Entity(
                    id=str(ed["id"]),
                    kind=kind,
                    category=category,
                    size=tuple(ed.get("size", DEFAULT_SIZES.get(category, (20, 20)))),
                    colors=[tuple(c) for c in ed["colors"]],
                    path=[tuple(float(v) for v in wp) for wp in ed.get("path", [])],
                    hidden=[tuple(float(v) for v in h) for h in ed.get("hidden", [])],
                    at=tuple(float(v) for v in ed["at"]) if ed.get("at") is not None else None,
                    carrier=ed.get("carrier"),
                    texture=int(ed.get("texture", 6)),
                ))
            acts = [Action(float(a["t"]), str(a["person"]), str(a["do"]), str(a["object"]),
                           tuple(float(v) for v in a["at"]) if a.get("at") is not None else None)
                    for a in d.get("actions", [])]
            w, h = d.get("size", [320, 240])
            sc = cls(name=str(d.get("name", "scenario")), width=int(w), height=int(h),
                     fps=float(d.get("fps", 25)), duration=float(d["duration"]), background=bg,
                     entities=ents, actions=acts, exits=[tuple(int(v) for v in r) for r in d.get("exits", [])],
                     description=str(d.get("description", "")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed scenario: {exc!r}") from exc
        validate(sc)
        return sc


def _num(v: float):
    return int(v) if float(v).is_integer() else round(float(v), 4)


def load_scenario(path) -> Scenario:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario {path} must be a mapping")
    return Scenario.from_dict(data)


def dump_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(sc.to_dict(), sort_keys=False, default_flow_style=None, width=100)


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(dump_scenario(sc))


def builtin_scenarios() -> List[str]:
    root = resources.files("sentinel") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def builtin_scenario(name: str) -> Scenario:
    if name not in builtin_scenarios():
        raise KeyError(f"no built-in scenario {name!r}")
    root = resources.files("sentinel") / "scenarios"
    data = yaml.safe_load((root / f"{name}.yaml").read_text())
    return Scenario.from_dict(data)


# -- geometry shared by renderer, ground truth and validation -------------------

def box_at(center: Tuple[float, float], size: Tuple[int, int]) -> BBox:
    w, h = size
    return BBox(math.floor(center[0] - w / 2.0 + 0.5), math.floor(center[1] - h / 2.0 + 0.5), w, h)


def box_gap(a: BBox, b: BBox) -> float:
    dx = max(b.x - a.x2, a.x - b.x2, 0)
    dy = max(b.y - a.y2, a.y - b.y2, 0)
    return math.hypot(dx, dy)


def interpolate(path: Sequence[Tuple[float, float, float]], t: float) -> Optional[Tuple[float, float]]:
    """Linear interpolation of a waypoint list; None outside its time span."""
    if not path or t < path[0][0] or t > path[-1][0]:
        return None
    for (t0, x0, y0), (t1, x1, y1) in zip(path, path[1:]):
        if t0 <= t <= t1:
            a = (t - t0) / (t1 - t0)
            return (x0 + a * (x1 - x0), y0 + a * (y1 - y0))
    return (path[-1][1], path[-1][2])


def default_drop_point(carrier_box: BBox, size: Tuple[int, int]) -> Tuple[float, float]:
    """Beside the carrier's right side, resting on the same floor line."""
    w, h = size
    return (carrier_box.x2 + 4 + w / 2.0, carrier_box.y2 - h / 2.0)


@dataclass(frozen=True)
class TruthBox:
    entity_id: str
    category: str
    box: BBox          # clipped to the frame
    full: BBox         # unclipped
    in_view: bool

    @property
    def visible_fraction(self) -> float:
        return self.box.area / self.full.area


class Timeline:
    """Per-frame entity states compiled from a scenario script."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        n = sc.n_frames
        clock = sc.clock
        self.n_frames = n
        self.person_centers: Dict[str, List[Optional[Tuple[float, float]]]] = {}
        for p in sc.persons:
            hidden = [(clock.frames(a), clock.frames(b)) for a, b in p.hidden]
            centers = []
            for i in range(n):
                c = interpolate(p.path, i / sc.fps)
                if c is not None and any(a <= i < b for a, b in hidden):
                    c = None
                centers.append(c)
            self.person_centers[p.id] = centers

        # objects: piecewise-constant (position | carrier) per frame
        self.actions = sorted(((clock.frames(a.t), k, a) for k, a in enumerate(sc.actions)), key=lambda x: (x[0], x[1]))
        self.object_state: Dict[str, List[Tuple[Optional[Tuple[float, float]], Optional[str]]]] = {}
        for o in sc.objects:
            state = (o.at, None) if o.at is not None else (None, o.carrier)
            events = [(f, a) for f, _, a in self.actions if a.object == o.id]
            states, ei = [], 0
            for i in range(n):
                while ei < len(events) and events[ei][0] <= i:
                    f, a = events[ei]
                    if a.do == "drop":
                        state = (self.drop_point(a, f), None)
                    else:
                        state = (None, a.person)
                    ei += 1
                states.append(state)
            self.object_state[o.id] = states

    def drop_point(self, a: Action, f: int) -> Tuple[float, float]:
        if a.at is not None:
            return a.at
        carrier = self.sc.entity(a.person)
        c = self.person_centers[a.person][min(f, self.n_frames - 1)]
        if c is None:
            c = interpolate(carrier.path, f / self.sc.fps)
        return default_drop_point(box_at(c, carrier.size), self.sc.entity(a.object).size)

    def person_box(self, pid: str, i: int) -> Optional[BBox]:
        c = self.person_centers[pid][i]
        return None if c is None else box_at(c, self.sc.entity(pid).size)

    def object_box(self, oid: str, i: int) -> Optional[BBox]:
        pos, carrier = self.object_state[oid][i]
        if pos is None:
            return None
        return box_at(pos, self.sc.entity(oid).size)

    def truth(self, i: int) -> List[TruthBox]:
        """Entities drawn at frame ``i``: placed objects first, then persons."""
        if not 0 <= i < self.n_frames:
            raise IndexError(f"frame {i} outside 0..{self.n_frames - 1}")
        w, h = self.sc.width, self.sc.height
        out = []
        for e in self.sc.objects + self.sc.persons:
            full = self.person_box(e.id, i) if e.is_person else self.object_box(e.id, i)
            if full is None:
                continue
            clipped = full.clamp(w, h)
            if clipped is None:
                continue
            out.append(TruthBox(e.id, e.category, clipped, full, clipped.area >= MIN_VISIBLE_FRACTION * full.area))
        return out

    def in_view(self, pid: str, i: int) -> bool:
        box = self.person_box(pid, i)
        if box is None:
            return False
        clipped = box.clamp(self.sc.width, self.sc.height)
        return clipped is not None and clipped.area >= MIN_VISIBLE_FRACTION * box.area

    def spans(self, pid: str) -> List[Tuple[int, int]]:
        """Maximal runs of frames in which the person is in view."""
        runs, start = [], None
        for i in range(self.n_frames):
            if self.in_view(pid, i):
                if start is None:
                    start = i
            elif start is not None:
                runs.append((start, i - 1))
                start = None
        if start is not None:
            runs.append((start, self.n_frames - 1))
        return runs

    def carrier_at(self, oid: str, i: int) -> Optional[str]:
        return self.object_state[oid][i][1]


# -- rendering ---------------------------------------------------------------

def _texture(seed_key: str, base_seed: int, size: Tuple[int, int], colors, amp: int) -> np.ndarray:
    w, h = size
    img = np.empty((h, w, 3), np.int16)
    if len(colors) == 1:
        img[:] = colors[0]
    else:
        bands = np.array_split(np.arange(h), len(colors))
        for rows, c in zip(bands, colors):
            img[rows] = c
    if amp:
        rng = np.random.default_rng([base_seed, zlib.crc32(seed_key.encode())])
        img += rng.integers(-amp, amp + 1, size=(h, w, 1), dtype=np.int16)
    return np.clip(img, 0, 255).astype(np.uint8)


class Renderer:
    def __init__(self, sc: Scenario):
        self.sc = sc
        self.timeline = sc.timeline
        bg = sc.background
        img = np.empty((sc.height, sc.width, 3), np.int16)
        img[:] = bg.color
        for box, color in bg.regions:
            b = BBox(*box).clamp(sc.width, sc.height)
            if b is not None:
                img[b.y:b.y2, b.x:b.x2] = color
        if bg.noise:
            rng = np.random.default_rng(bg.seed)
            img += rng.integers(-bg.noise, bg.noise + 1, size=(sc.height, sc.width, 1), dtype=np.int16)
        self.background = np.clip(img, 0, 255).astype(np.uint8)
        self.sprites = {e.id: _texture(e.id, bg.seed, e.size, e.colors, e.texture) for e in sc.entities}

    def render(self, i: int) -> Frame:
        if not 0 <= i < self.sc.n_frames:
            raise IndexError(f"frame {i} outside 0..{self.sc.n_frames - 1}")
        px = self.background.copy()
        for tb in self.timeline.truth(i):
            sprite = self.sprites[tb.entity_id]
            b, f = tb.box, tb.full
            px[b.y:b.y2, b.x:b.x2] = sprite[b.y - f.y:b.y2 - f.y, b.x - f.x:b.x2 - f.x]
        return Frame(px, i, self.sc.fps)

    def __iter__(self):
        for i in range(self.sc.n_frames):
            yield self.render(i)


def render(sc: Scenario, frame_index: int) -> Frame:
    return Renderer(sc).render(frame_index)


# -- validation -----------------------------------------------------------------

def validate(sc: Scenario) -> None:
    """Raise ScenarioError listing every script inconsistency found."""
    problems: List[str] = []
    if sc.width <= 0 or sc.height <= 0 or sc.fps <= 0 or sc.duration <= 0:
        problems.append("size, fps and duration must be positive")
    ids = [e.id for e in sc.entities]
    if len(set(ids)) != len(ids):
        problems.append("duplicate entity ids")
    kinds = {e.id: e for e in sc.entities}
    for r in sc.exits:
        if len(r) != 4 or r[2] <= 0 or r[3] <= 0:
            problems.append(f"bad exit region {r}")
    for e in sc.entities:
        if e.kind not in (PERSON, "object"):
            problems.append(f"{e.id}: unknown kind {e.kind!r}")
            continue
        if e.size[0] <= 0 or e.size[1] <= 0:
            problems.append(f"{e.id}: non-positive size")
        if not e.colors:
            problems.append(f"{e.id}: no colors")
        if e.is_person:
            if not e.path:
                problems.append(f"{e.id}: person without a path")
            times = [wp[0] for wp in e.path]
            if any(b <= a for a, b in zip(times, times[1:])):
                problems.append(f"{e.id}: waypoint times must increase")
            if times and (times[0] < 0 or times[-1] > sc.duration):
                problems.append(f"{e.id}: waypoints outside [0, {sc.duration}]")
            for (t0, x0, y0), (t1, x1, y1) in zip(e.path, e.path[1:]):
                if t1 > t0 and math.hypot(x1 - x0, y1 - y0) / (t1 - t0) > MAX_SPEED + 1e-9:
                    problems.append(f"{e.id}: teleport between t={t0} and t={t1}")
            for a, b in e.hidden:
                if not a < b:
                    problems.append(f"{e.id}: empty hidden interval")
        else:
            if e.category not in OBJECT_CATEGORIES:
                problems.append(f"{e.id}: unknown category {e.category!r}")
            if (e.at is None) == (e.carrier is None):
                problems.append(f"{e.id}: needs exactly one of 'at' or 'carrier'")
            if e.carrier is not None and (e.carrier not in kinds or not kinds[e.carrier].is_person):
                problems.append(f"{e.id}: carrier {e.carrier!r} is not a person")
            if e.path:
                problems.append(f"{e.id}: objects move only by being carried")
    if problems:
        raise ScenarioError("; ".join(problems))

    # replay actions against object state
    carried = {o.id: o.carrier for o in sc.objects}
    placed = {o.id: o.at for o in sc.objects}
    for a in sorted(sc.actions, key=lambda a: a.t):
        if a.person not in kinds or not kinds[a.person].is_person:
            problems.append(f"t={a.t}: unknown person {a.person!r}")
            continue
        if a.object not in kinds or kinds[a.object].is_person:
            problems.append(f"t={a.t}: unknown object {a.object!r}")
            continue
        if not 0 <= a.t <= sc.duration:
            problems.append(f"t={a.t}: action outside the scenario")
            continue
        person = kinds[a.person]
        c = interpolate(person.path, a.t)
        if c is None:
            problems.append(f"t={a.t}: {a.person} not in the scene")
            continue
        pbox = box_at(c, person.size)
        osize = kinds[a.object].size
        if a.do == "drop":
            if carried[a.object] != a.person:
                problems.append(f"t={a.t}: {a.person} drops {a.object} without carrying it")
                continue
            at = a.at if a.at is not None else default_drop_point(pbox, osize)
            if box_gap(pbox, box_at(at, osize)) > REACH:
                problems.append(f"t={a.t}: {a.object} dropped out of {a.person}'s reach")
            carried[a.object], placed[a.object] = None, at
        elif a.do == "pick":
            if placed[a.object] is None:
                problems.append(f"t={a.t}: {a.object} is not on the floor")
                continue
            if box_gap(pbox, box_at(placed[a.object], osize)) > REACH:
                problems.append(f"t={a.t}: {a.object} out of {a.person}'s reach")
            carried[a.object], placed[a.object] = a.person, None
        else:
            problems.append(f"t={a.t}: unknown action {a.do!r}")
    if problems:
        raise ScenarioError("; ".join(problems))


# -- ground truth -----------------------------------------------------------------

def ground_truth(sc: Scenario, own: Optional[OwnershipConfig] = None):
    """Per-frame truth boxes plus the events the rules imply for the script.

    Ownership follows the script: whoever drops an object owns it; objects on
    the floor at t=0 belong to the scene. Abandonment, relocation and theft are
    replayed from the script with the detection rules (edge exit, exit regions,
    30 s absence).
    """
    tl = sc.timeline
    boxes = [tl.truth(i) for i in range(tl.n_frames)]
    return boxes, derive_events(sc, own)


def derive_events(sc: Scenario, own: Optional[OwnershipConfig] = None) -> List[SecurityEvent]:
    own = own or OwnershipConfig()
    tl = sc.timeline
    n = tl.n_frames
    margin = own.edge_margin(sc.width, sc.height)
    timeout = sc.clock.frames(own.abandon_timeout_s)
    exits = sc.exit_boxes

    def exit_kind(pid: str, end: int) -> str:
        if end >= n - 1:
            return "end"
        box = tl.person_box(pid, end).clamp(sc.width, sc.height)
        return "edge" if in_edge_band(box, sc.width, sc.height, margin) else "vanish"

    spans = {p.id: tl.spans(p.id) for p in sc.persons}

    def departures(pid: str, after: int):
        """(frame the rules notice the departure, how) for each span ending at/after ``after``."""
        out = []
        sp = spans[pid]
        for k, (a, b) in enumerate(sp):
            if b < after:
                continue
            kind = exit_kind(pid, b)
            if kind == "end":
                break
            if kind == "edge":
                out.append((b, "edge"))
            else:
                back = sp[k + 1][0] if k + 1 < len(sp) else None
                if back is None or back > b + timeout:
                    out.append((b + timeout + 1, "absent"))
        return out

    def door_entry(pid: str, after: int) -> Optional[int]:
        if not exits:
            return None
        for i in range(after, n):
            box = tl.person_box(pid, i)
            if box is None or not tl.in_view(pid, i):
                continue
            c = box.clamp(sc.width, sc.height).center
            if any(r.contains(c) for r in exits):
                return i
        return None

    events: List[SecurityEvent] = []
    owner: Dict[str, Optional[str]] = {o.id: None for o in sc.objects}
    scene_owned = {o.id: o.at is not None for o in sc.objects}
    placed_since: Dict[str, Optional[int]] = {o.id: (0 if o.at is not None else None) for o in sc.objects}
    watch: Dict[str, Tuple[str, int, Optional[int]]] = {}

    def close_epoch(oid: str, end: int):
        start, p = placed_since[oid], owner[oid]
        if start is None or p is None or scene_owned[oid]:
            return
        for when, how in departures(p, start):
            if when < end and when < n:
                events.append(SecurityEvent(when, EventKind.ABANDONED, oid, p, detail=f"owner left ({how})"))
            break

    for f, _, a in tl.actions:
        oid, pid = a.object, a.person
        if a.do == "drop":
            w = watch.pop(oid, None)
            if w is not None and w[0] == pid and (w[2] is None or f < w[2]):
                events.append(SecurityEvent(f, EventKind.RELOCATED, oid, pid, detail="moved to a new place"))
            elif w is not None and w[2] is not None:
                events.append(SecurityEvent(w[2], EventKind.THEFT, oid, w[0], detail="left with object"))
            owner[oid], scene_owned[oid], placed_since[oid] = pid, False, f
        else:
            close_epoch(oid, f)
            placed_since[oid] = None
            if scene_owned[oid]:
                events.append(SecurityEvent(f, EventKind.SUSPECT_BACKGROUND, oid, pid, detail="scene object moved"))
            elif owner[oid] == pid:
                events.append(SecurityEvent(f, EventKind.MOVED_BY_OWNER, oid, pid))
            else:
                events.append(SecurityEvent(f, EventKind.MOVED_BY_NON_OWNER, oid, pid, detail="warning: not the owner"))
                candidates = [d for d in (door_entry(pid, f),) if d is not None]
                candidates += [w for w, _ in departures(pid, f)]
                theft_at = min((c for c in candidates if c < n), default=None)
                watch[oid] = (pid, f, theft_at)
    for oid in owner:
        close_epoch(oid, n)
    for oid, (pid, f, theft_at) in watch.items():
        if theft_at is not None:
            events.append(SecurityEvent(theft_at, EventKind.THEFT, oid, pid, detail="left with object"))
    return sorted(events, key=SecurityEvent.sort_key)


# -- authoring helpers --------------------------------------------------------------

class ScriptBuilder:
    """Small imperative helper for writing consistent scripts."""

    def __init__(self, name: str, width: int = 320, height: int = 240, fps: float = 25.0,
                 background: Optional[BackgroundSpec] = None, description: str = ""):
        self.sc = Scenario(name, width, height, fps, 1.0, background or BackgroundSpec(), description=description)

    def person(self, pid: str, colors, size=DEFAULT_SIZES[PERSON]) -> str:
        self.sc.entities.append(Entity(pid, PERSON, PERSON, tuple(size), [tuple(c) for c in colors]))
        return pid

    def obj(self, oid: str, category: str, colors, at=None, carrier=None, size=None) -> str:
        self.sc.entities.append(Entity(oid, "object", category, tuple(size or DEFAULT_SIZES[category]),
                                       [tuple(c) for c in colors], at=at, carrier=carrier))
        return oid

    def exit_region(self, box) -> None:
        self.sc.exits.append(tuple(box))

    def _path(self, pid: str):
        return self.sc.entity(pid).path

    def appear(self, pid: str, t: float, at) -> float:
        self._path(pid).append((float(t), float(at[0]), float(at[1])))
        return t

    def walk(self, pid: str, to, speed: float = 50.0) -> float:
        path = self._path(pid)
        t0, x0, y0 = path[-1]
        dist = math.hypot(to[0] - x0, to[1] - y0)
        t1 = round(t0 + max(dist / speed, 0.04), 2)
        path.append((t1, float(to[0]), float(to[1])))
        return t1

    def wait(self, pid: str, until: float) -> float:
        path = self._path(pid)
        t0, x0, y0 = path[-1]
        if until > t0:
            path.append((float(until), x0, y0))
        return max(until, t0)

    def now(self, pid: str) -> float:
        return self._path(pid)[-1][0]

    def pos(self, pid: str):
        return self._path(pid)[-1][1:]

    def drop(self, pid: str, oid: str, t: Optional[float] = None, at=None) -> float:
        t = self.now(pid) if t is None else t
        self.sc.actions.append(Action(float(t), pid, "drop", oid, tuple(at) if at is not None else None))
        return t

    def pick(self, pid: str, oid: str, t: Optional[float] = None) -> float:
        t = self.now(pid) if t is None else t
        self.sc.actions.append(Action(float(t), pid, "pick", oid))
        return t

    def build(self, duration: Optional[float] = None, tail: float = 6.0) -> Scenario:
        last = max([wp[0] for e in self.sc.persons for wp in e.path] + [a.t for a in self.sc.actions] + [0.0])
        self.sc.duration = float(duration if duration is not None else math.ceil(last + tail))
        validate(self.sc)
        return self.sc


def stand_point(site, side: int, person_size=DEFAULT_SIZES[PERSON], obj_size=DEFAULT_SIZES["bag"], gap: int = 6):
    """Where a person stands to handle an object at ``site`` from the left (-1) or right (+1)."""
    pw, ph = person_size
    ow, oh = obj_size
    x = site[0] + side * (ow / 2.0 + gap + pw / 2.0)
    y = site[1] + oh / 2.0 - ph / 2.0
    return (x, y)


PERSON_PALETTE = [
    [(200, 40, 40), (40, 40, 90)],
    [(40, 70, 200), (200, 190, 60)],
    [(30, 160, 70), (90, 30, 30)],
    [(220, 130, 20), (30, 90, 90)],
    [(150, 40, 170), (220, 220, 220)],
    [(20, 170, 180), (60, 20, 80)],
    [(240, 240, 60), (20, 20, 20)],
    [(250, 110, 170), (20, 80, 20)],
]
OBJECT_PALETTE = [
    [(180, 20, 20)],
    [(20, 40, 170)],
    [(20, 130, 40)],
    [(230, 170, 0)],
    [(110, 20, 140)],
    [(0, 160, 160)],
    [(240, 240, 240)],
    [(20, 20, 20)],
]


def generate_random(seed: int, n_persons: int = 3, n_objects: int = 2, p_theft: float = 0.5,
                    p_stranger: float = 0.5, p_return: float = 0.3, p_leave: float = 0.5,
                    width: int = 320, height: int = 240, fps: float = 25.0, max_attempts: int = 50) -> Scenario:
    """Random but causally ordered script, reproducible from ``seed``.

    Episodes run one after another: an owner brings an object to a free site,
    drops it and either leaves or steps aside; then a stranger may take it
    (stealing or relocating it) or the owner may come back for it.
    """
    if n_objects < 0 or n_persons < 0:
        raise ScenarioError("counts must be non-negative")
    if n_objects > n_persons:
        raise ScenarioError(f"{n_objects} carried objects need at least as many persons, got {n_persons}")
    for name, p in (("p_theft", p_theft), ("p_stranger", p_stranger), ("p_return", p_return), ("p_leave", p_leave)):
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(f"{name} must be a probability")
    if p_stranger + p_return > 1.0:
        raise ScenarioError("p_stranger + p_return must not exceed 1")
    xs = [w * width for w in (0.22, 0.5, 0.78)]
    ys = [h * height for h in (0.48, 0.78)]
    sites = [(round(x), round(y)) for y in ys for x in xs]
    if 2 * n_objects > len(sites):
        raise ScenarioError(f"at most {len(sites) // 2} objects fit the site grid")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        sc = _random_script(rng, seed, n_persons, n_objects, p_theft, p_stranger, p_return, p_leave,
                            width, height, fps, sites)
        if sc is not None and not persons_overlap(sc):
            return sc
    raise ScenarioError(f"could not build a collision-free script for seed {seed}")


def _random_script(rng, seed, n_persons, n_objects, p_theft, p_stranger, p_return, p_leave,
                   width, height, fps, sites) -> Optional[Scenario]:
    b = ScriptBuilder(f"random-{seed}", width, height, fps,
                      BackgroundSpec(seed=int(seed) % (2 ** 31), regions=[((0, 0, width, int(height * 0.3)), (168, 168, 158))]),
                      description=f"generated with seed {seed}")
    pcolors = rng.permutation(len(PERSON_PALETTE))
    ocolors = rng.permutation(len(OBJECT_PALETTE))
    persons = [b.person(f"P{k + 1}", PERSON_PALETTE[pcolors[k % len(pcolors)]]) for k in range(n_persons)]
    cats = ("bag", "backpack", "suitcase", "laptop", "box")
    objects = [b.obj(f"O{k + 1}", cats[int(rng.integers(len(cats)))], OBJECT_PALETTE[ocolors[k % len(ocolors)]],
                     carrier=persons[k]) for k in range(n_objects)]
    strangers = persons[n_objects:]
    free = list(range(len(sites)))
    rng.shuffle(free)
    t = 1.0
    off = {-1: -14.0, +1: width + 14.0}

    for k, oid in enumerate(objects):
        owner = persons[k]
        site = sites[free.pop()]
        osize = b.sc.entity(oid).size
        side = -1 if rng.random() < 0.5 else +1
        stand = stand_point(site, side, obj_size=osize)
        b.appear(owner, t, (off[side], stand[1]))
        b.walk(owner, stand)
        td = b.wait(owner, b.now(owner) + 0.5)
        b.drop(owner, oid, td, at=site)
        b.wait(owner, td + 4.0)
        owner_left = rng.random() < p_leave
        if owner_left:
            b.walk(owner, (off[side], stand[1]))
        else:
            b.walk(owner, (stand[0] + side * 60, stand[1]))
        t_free = b.now(owner) + 3.0
        r = rng.random()
        episode_end = t_free
        if strangers and r < p_stranger:
            q = strangers.pop(0)
            qs = stand_point(site, -side, obj_size=osize)
            b.appear(q, t_free, (off[-side], qs[1]))
            b.walk(q, qs)
            tp = b.wait(q, b.now(q) + 0.5)
            b.pick(q, oid, tp)
            b.wait(q, tp + 1.0)
            if rng.random() < p_theft or not free:
                b.walk(q, (off[-side], qs[1]))
            else:
                new_site = sites[free.pop()]
                nside = -1 if new_site[0] > width / 2 else +1
                ns = stand_point(new_site, nside, obj_size=osize)
                b.walk(q, ns)
                td2 = b.wait(q, b.now(q) + 0.5)
                b.drop(q, oid, td2, at=new_site)
                b.wait(q, td2 + 4.0)
                b.walk(q, (off[nside], ns[1]))
            episode_end = b.now(q)
        elif r < p_stranger + p_return:
            if owner_left:
                b.wait(owner, t_free)
            b.walk(owner, stand)
            tp = b.wait(owner, b.now(owner) + 0.5)
            b.pick(owner, oid, tp)
            b.wait(owner, tp + 1.0)
            b.walk(owner, (off[side], stand[1]))
        if b.pos(owner)[0] not in off.values():
            b.wait(owner, episode_end)
            b.walk(owner, (off[side], b.pos(owner)[1]))
        t = max(episode_end, b.now(owner)) + 2.0
    for p in persons:
        if not b.sc.entity(p).path:
            side = -1 if rng.random() < 0.5 else +1
            y = min(s[1] for s in sites) - 10
            b.appear(p, t, (off[side], y))
            b.walk(p, (off[-side], y))
            t = b.now(p) + 1.0
    try:
        return b.build(tail=8.0)
    except ScenarioError:
        return None


def persons_overlap(sc: Scenario, step: int = 1) -> bool:
    """True when two persons' boxes intersect in some frame."""
    tl = sc.timeline
    ids = [p.id for p in sc.persons]
    for i in range(0, tl.n_frames, step):
        boxes = [tl.person_box(p, i) for p in ids if tl.in_view(p, i)]
        for a in range(len(boxes)):
            for c in range(a + 1, len(boxes)):
                if boxes[a].intersection(boxes[c]) > 0:
                    return True
    return False
