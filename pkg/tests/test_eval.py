import random
from pathlib import Path

import pytest

from sentinel.eval import COLUMNS, Counts, from_counts, match_events, pct, report
from sentinel.events import EventKind, SecurityEvent, read_events

FIXTURES = Path(__file__).parent / "fixtures"

# reference sum row: column -> (precision %, recall %)
REFERENCE_SUM_ROW = {
    "Abandoning": (61.9, 92.8),
    "Moved by owner": (55.6, 50.0),
    "Moved by un-owner": (50.0, 50.0),
    "Theft": (83.3, 62.5),
}


def ev(frame, kind, oid="bag"):
    return SecurityEvent(frame, kind, oid, "P")


def test_identical_logs_are_perfect():
    gt = [ev(100, EventKind.ABANDONED), ev(900, EventKind.MOVED_BY_OWNER, "b2"), ev(1200, EventKind.THEFT, "b3")]
    tot = match_events(gt, gt).total()
    for c in ("Abandoning", "Moved by owner", "Theft"):
        assert (tot[c].precision, tot[c].recall) == (1.0, 1.0)


def test_tolerance_window():
    gt = [ev(1000, EventKind.ABANDONED)]
    assert match_events([ev(1125, EventKind.ABANDONED)], gt).total()["Abandoning"].tp == 1
    assert match_events([ev(1126, EventKind.ABANDONED)], gt).total()["Abandoning"].tp == 0


def test_kind_and_object_must_agree():
    gt = [ev(1000, EventKind.ABANDONED, "bag")]
    assert match_events([ev(1000, EventKind.ABANDONED, "box")], gt).total()["Abandoning"].fp == 1
    assert match_events([ev(1000, EventKind.THEFT, "bag")], gt).total()["Theft"].fp == 1


def test_relocation_counts_as_un_owner():
    gt = [ev(50, EventKind.RELOCATED)]
    row = match_events(gt, gt).total()["Moved by un-owner"]
    assert (row.gt, row.tp) == (1, 1)


def test_order_of_logs_does_not_matter():
    rng = random.Random(0)
    kinds = [EventKind.ABANDONED, EventKind.MOVED_BY_OWNER, EventKind.THEFT]
    gt = [ev(rng.randrange(0, 5000), rng.choice(kinds), f"o{rng.randrange(4)}") for _ in range(30)]
    pred = [SecurityEvent(g.frame + rng.randrange(-100, 100), g.kind, g.object_id) for g in gt[:20]]
    pred += [ev(rng.randrange(0, 5000), rng.choice(kinds), "x") for _ in range(5)]
    base = match_events(pred, gt).to_dict()
    for _ in range(5):
        rng.shuffle(pred)
        rng.shuffle(gt)
        assert match_events(pred, gt).to_dict() == base


def test_sum_row_sum_row_from_fixture_logs():
    rep = match_events(read_events(FIXTURES / "sum_row_pred.jsonl"), read_events(FIXTURES / "sum_row_gt.jsonl"))
    tot = rep.total()
    assert [(tot[c].gt, tot[c].tp, tot[c].fp) for c in COLUMNS] == [(14, 13, 8), (10, 5, 4), (6, 3, 3), (8, 5, 1)]
    for c, (p, r) in REFERENCE_SUM_ROW.items():
        # the reference row mixes truncation (92.8) and rounding (55.6); both are within 0.1
        assert abs(100 * tot[c].precision - p) <= 0.1
        assert abs(100 * tot[c].recall - r) <= 0.1


def test_from_counts_matches_fixture_report():
    rep = from_counts({"sum": {"Abandoning": (14, 13, 8), "Moved by owner": (10, 5, 4),
                               "Moved by un-owner": (6, 3, 3), "Theft": (8, 5, 1)}})
    text = report(rep)
    assert "61.9" in text and "92.9" in text and "55.6" in text and "83.3" in text and "62.5" in text


def test_empty_run_reports_na():
    text = report(match_events([], []))
    prec = next(l for l in text.splitlines() if l.startswith("Precision"))
    assert prec.split()[2:] == ["n/a"] * 4
    rec = next(l for l in text.splitlines() if l.startswith("Recall"))
    assert rec.split()[2:] == ["100.0"] * 4


def test_counts_edge_cases():
    assert Counts(0, 0, 3).precision == 0.0 and Counts(0, 0, 3).recall == 1.0
    assert Counts(4, 0, 0).recall == 0.0
    assert pct(5 / 9) == "55.6"
    assert pct(1 / 3) == "33.3"
