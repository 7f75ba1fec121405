"""Event-level precision/recall in the layout of the evaluation tables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sentinel.events import EventKind, SecurityEvent

# report column -> event kinds counted in it
COLUMNS: Dict[str, Tuple[EventKind, ...]] = {
    "Abandoning": (EventKind.ABANDONED,),
    "Moved by owner": (EventKind.MOVED_BY_OWNER,),
    "Moved by un-owner": (EventKind.MOVED_BY_NON_OWNER, EventKind.RELOCATED),
    "Theft": (EventKind.THEFT,),
}


@dataclass
class Counts:
    gt: int = 0
    tp: int = 0
    fp: int = 0

    @property
    def fn(self) -> int:
        return self.gt - self.tp

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        if self.gt == 0:
            return 1.0 if self.tp == 0 else 0.0
        return self.tp / self.gt

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.gt + other.gt, self.tp + other.tp, self.fp + other.fp)

    def as_dict(self) -> dict:
        return {"gt": self.gt, "tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": round(self.precision, 6), "recall": round(self.recall, 6)}


@dataclass
class MatchReport:
    rows: Dict[str, Dict[str, Counts]] = field(default_factory=dict)
    matches: List[Tuple[SecurityEvent, SecurityEvent]] = field(default_factory=list)
    false_positives: List[SecurityEvent] = field(default_factory=list)
    misses: List[SecurityEvent] = field(default_factory=list)

    def total(self) -> Dict[str, Counts]:
        out = {c: Counts() for c in COLUMNS}
        for row in self.rows.values():
            for c, n in row.items():
                out[c] = out[c] + n
        return out

    def merge(self, other: "MatchReport") -> "MatchReport":
        for name, row in other.rows.items():
            self.rows[name] = row
        self.matches += other.matches
        self.false_positives += other.false_positives
        self.misses += other.misses
        return self

    def to_dict(self) -> dict:
        return {
            "rows": {name: {c: n.as_dict() for c, n in row.items()} for name, row in self.rows.items()},
            "total": {c: n.as_dict() for c, n in self.total().items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def column_of(kind: EventKind) -> Optional[str]:
    for c, kinds in COLUMNS.items():
        if kind in kinds:
            return c
    return None


def match_events(predicted: Iterable[SecurityEvent], gt: Iterable[SecurityEvent], tolerance_s: float = 5.0,
                 fps: float = 25.0, name: str = "run") -> MatchReport:
    """Greedy one-to-one matching of predictions to ground truth.

    Both lists are put in time order first. Each prediction takes the
    earliest unmatched ground-truth event of the same kind and object within
    ``tolerance_s``. Only the four table columns are counted.
    """
    tol = tolerance_s * fps
    preds = sorted(predicted, key=SecurityEvent.sort_key)
    truth = sorted(gt, key=SecurityEvent.sort_key)
    used = [False] * len(truth)
    row = {c: Counts() for c in COLUMNS}
    rep = MatchReport({name: row})
    for g in truth:
        c = column_of(g.kind)
        if c is not None:
            row[c].gt += 1
    for p in preds:
        c = column_of(p.kind)
        if c is None:
            continue
        hit = None
        for k, g in enumerate(truth):
            if not used[k] and g.kind == p.kind and str(g.object_id) == str(p.object_id) and abs(g.frame - p.frame) <= tol:
                hit = k
                break
        if hit is None:
            row[c].fp += 1
            rep.false_positives.append(p)
        else:
            used[hit] = True
            row[c].tp += 1
            rep.matches.append((p, truth[hit]))
    rep.misses = [g for k, g in enumerate(truth) if not used[k] and column_of(g.kind) is not None]
    return rep


def from_counts(rows: Dict[str, Dict[str, Tuple[int, int, int]]]) -> MatchReport:
    """Report built directly from (GT, TP, FP) triples."""
    rep = MatchReport()
    for name, row in rows.items():
        rep.rows[name] = {c: Counts(*row.get(c, (0, 0, 0))) for c in COLUMNS}
    return rep


def pct(x: float, defined: bool = True) -> str:
    return f"{100.0 * x:.1f}" if defined else "n/a"


def report(rep: MatchReport) -> str:
    """Fixed-width table: one row per scenario, then sums and precision/recall."""
    cols = list(COLUMNS)
    head1 = f"{'':14s}" + "".join(f"{c:^18s}" for c in cols)
    head2 = f"{'Video':14s}" + "".join(f"{'GT':>6s}{'TP':>6s}{'FP':>6s}" for _ in cols)
    lines = [head1, head2, "-" * len(head2)]
    for name, row in rep.rows.items():
        lines.append(f"{name[:14]:14s}" + "".join(f"{row[c].gt:6d}{row[c].tp:6d}{row[c].fp:6d}" for c in cols))
    tot = rep.total()
    lines.append("-" * len(head2))
    lines.append(f"{'Sum':14s}" + "".join(f"{tot[c].gt:6d}{tot[c].tp:6d}{tot[c].fp:6d}" for c in cols))
    lines.append(f"{'Precision (%)':14s}" + "".join(f"{pct(tot[c].precision, tot[c].tp + tot[c].fp > 0):>18s}" for c in cols))
    lines.append(f"{'Recall (%)':14s}" + "".join(f"{pct(tot[c].recall):>18s}" for c in cols))
    return "\n".join(lines)
