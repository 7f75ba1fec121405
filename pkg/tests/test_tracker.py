import itertools
import random

import pytest

from sentinel.config import TrackConfig
from sentinel.core import BBox, iou
from sentinel.tracker import Trace, Tracker, associate, trace_window


def brute_force_best(dets, preds, iou_min):
    """Exhaustive search over every partial one-to-one matching."""
    n, m = len(dets), len(preds)
    best = 0.0
    k = min(n, m)
    for cols in itertools.permutations(range(m), k) if n <= m else itertools.permutations(range(n), k):
        pairs = zip(range(n), cols) if n <= m else zip(cols, range(m))
        total = 0.0
        for i, j in pairs:
            v = iou(dets[i], preds[j])
            if v >= iou_min:
                total += v
        best = max(best, total)
    return best


def random_boxes(rng, n):
    return [BBox(rng.randint(0, 60), rng.randint(0, 60), rng.randint(5, 30), rng.randint(5, 30)) for _ in range(n)]


def test_assignment_is_optimal_small_cases():
    rng = random.Random(5)
    for _ in range(200):
        dets, preds = random_boxes(rng, rng.randint(0, 5)), random_boxes(rng, rng.randint(0, 5))
        matches, ud, up = associate(dets, preds, 0.3)
        total = sum(iou(dets[i], preds[j]) for i, j in matches)
        assert total == pytest.approx(brute_force_best(dets, preds, 0.3), abs=1e-9)
        assert all(iou(dets[i], preds[j]) >= 0.3 for i, j in matches)
        assert sorted([i for i, _ in matches] + ud) == list(range(len(dets)))
        assert sorted([j for _, j in matches] + up) == list(range(len(preds)))


def test_constant_velocity_keeps_one_id():
    tr = Tracker()
    for i in range(500):
        tr.step([BBox(10 + i // 2, 50, 20, 44)], i)
    assert list(tr.traces) == [1]
    assert len(tr.traces[1].samples) == 500


def test_crossing_persons_never_swap():
    tr = Tracker()
    for i in range(300):
        a = BBox(5 + i, 20, 20, 44)
        b = BBox(300 - i, 100, 20, 44)
        tr.step([a, b], i)
    assert len(tr.traces) == 2
    first_a = [t for t in tr.traces.values() if t.samples[0].box.y == 20][0]
    assert all(s.box.y == 20 for s in first_a.samples)
    assert len(first_a.samples) == 300


@pytest.mark.parametrize("gap,same", [(25, True), (26, False)])
def test_gap_longer_than_max_age_retires_track(gap, same):
    tr = Tracker(TrackConfig(max_age=25))
    box = BBox(50, 50, 20, 44)
    for i in range(10):
        tr.step([box], i)
    for i in range(10, 10 + gap):
        tr.step([], i)
    tr.step([box], 10 + gap)
    assert (len(tr.traces) == 1) is same
    if not same:
        assert tr.traces[1].alive is False
        assert 2 in tr.traces


def test_ids_never_reused():
    tr = Tracker(TrackConfig(max_age=2))
    seen = []
    for burst in range(5):
        for i in range(5):
            tr.step([BBox(10 * burst, 10, 20, 20)], burst * 20 + i)
        for i in range(5, 20):
            tr.step([], burst * 20 + i)
        seen.append(max(tr.traces))
    assert seen == [1, 2, 3, 4, 5]


def test_min_hits_confirmation():
    tr = Tracker(TrackConfig(min_hits=3))
    box = BBox(0, 0, 10, 10)
    tr.step([box], 0)
    tr.step([box], 1)
    assert tr.confirmed() == []
    tr.step([box], 2)
    assert [t.id for t in tr.confirmed()] == [1]


def test_trace_rejects_out_of_order_samples():
    t = Trace(1)
    t.add(5, BBox(0, 0, 2, 2))
    with pytest.raises(ValueError):
        t.add(5, BBox(0, 0, 2, 2))


def make_trace(frames):
    t = Trace(1)
    for f in frames:
        t.add(f, BBox(f, 0, 4, 4))
    return t


def test_trace_window_before_first_appearance():
    assert trace_window(make_trace(range(100, 200)), 0.0, 3.0) == []


def test_trace_window_two_seconds_at_most_51_samples():
    t = make_trace(range(0, 500))
    assert len(trace_window(t, 8.0, 10.0)) == 51


def test_trace_window_matches_filter_oracle():
    rng = random.Random(2)
    frames = sorted(rng.sample(range(1000), 300))
    t = make_trace(frames)
    for _ in range(50):
        end = rng.uniform(0, 40)
        got = [s.frame for s in trace_window(t, end - 2, end)]
        assert got == [f for f in frames if end - 2 <= f / 25 <= end]


def test_trace_window_requires_order():
    with pytest.raises(ValueError):
        trace_window(make_trace([1]), 2.0, 1.0)
