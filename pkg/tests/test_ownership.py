import pytest
from hypothesis import given, strategies as st

from sentinel.config import OwnershipConfig
from sentinel.core import BBox
from sentinel.ownership import AbandonmentMonitor, PersonRecord, assign_owner, check_abandonment, in_edge_band
from sentinel.tracker import Trace

W, H = 320, 240


def trace(pid, points, start=0, size=(20, 44)):
    t = Trace(pid)
    for k, (x, y) in enumerate(points):
        t.add(start + k, BBox(int(x - size[0] / 2), int(y - size[1] / 2), *size))
    return t


def still(pid, x, y, frames, start=0):
    return trace(pid, [(x, y)] * frames, start)


BAG = BBox(150, 150, 20, 20)  # center (160, 160)


def test_single_person_in_window_owns():
    assert assign_owner(BAG, [still(3, 100, 100, 60)], 59) == 3


def test_nearest_on_average_wins():
    a = still(1, 170, 160, 60)   # 10 px away
    b = still(2, 260, 160, 60)   # 100 px away
    assert assign_owner(BAG, [b, a], 59) == 1


def test_only_window_samples_count():
    # B was right next to the bag long ago, A is close during the last two seconds
    b = still(2, 160, 162, 50, start=0)
    a = still(1, 200, 160, 60, start=200)
    assert assign_owner(BAG, [a, b], 259) == 1


def test_empty_room_has_no_owner():
    assert assign_owner(BAG, [still(1, 10, 10, 10, start=0)], 500) is None
    assert assign_owner(BAG, [], 500) is None


def test_tie_goes_to_lowest_id():
    assert assign_owner(BAG, [still(7, 180, 160, 30), still(4, 140, 160, 30)], 29) == 4


@given(st.integers(1, 6), st.lists(st.tuples(st.integers(0, 150), st.integers(0, 110)), min_size=2, max_size=5))
def test_assign_owner_scale_invariant(k, spots):
    box = BBox(60, 50, 10, 10)
    traces = [still(i + 1, x, y, 20) for i, (x, y) in enumerate(spots)]
    scaled_box = BBox(box.x * k, box.y * k, box.w * k, box.h * k)
    scaled = [trace(i + 1, [(x * k, y * k)] * 20, size=(20 * k, 44 * k)) for i, (x, y) in enumerate(spots)]
    assert assign_owner(box, traces, 19) == assign_owner(scaled_box, scaled, 19 * 1)


def person(pid, t, alive=True):
    t.alive = alive
    return PersonRecord(pid, t)


def test_rule1_edge_exit_and_track_death():
    t = trace(1, [(160 - 5 * k, 120) for k in range(30)])  # walks to x=15, box x=5 -> edge band
    assert in_edge_band(t.last.box, W, H, 12)
    p = person(1, t, alive=True)
    assert check_abandonment(0, p, 30, W, H) is None           # still tracked
    p.trace.alive = False
    assert check_abandonment(0, p, 30, W, H) == "owner left (edge)"


def test_rule1_needs_the_edge():
    p = person(1, still(1, 160, 120, 10), alive=False)
    assert check_abandonment(0, p, 20, W, H) is None


@pytest.mark.parametrize("absent,fires", [(749, False), (750, False), (751, True)])
def test_rule2_thirty_seconds(absent, fires):
    p = person(1, still(1, 160, 120, 10), alive=False)
    last = p.last_seen
    assert (check_abandonment(0, p, last + absent, W, H) is not None) is fires


def test_owner_sitting_beside_bag_never_abandons():
    t = still(1, 175, 160, 15000)
    p = person(1, t)
    mon = AbandonmentMonitor(W, H)
    assert all(mon.update(9, 0, p, now) is None for now in range(0, 15000, 5))


def test_ownerless_object_after_thirty_seconds():
    cfg = OwnershipConfig()
    assert check_abandonment(100, None, 850, W, H, cfg) is None
    assert check_abandonment(100, None, 851, W, H, cfg) == "no owner"
    assert check_abandonment(100, None, 5000, W, H, OwnershipConfig(ownerless_abandon=False)) is None


def test_abandonment_latches_once():
    p = person(1, still(1, 160, 120, 10), alive=False)
    mon = AbandonmentMonitor(W, H)
    fired = [now for now in range(0, 2000) if mon.update(5, 0, p, now)]
    assert fired == [9 + 751]
    assert mon.is_abandoned(5)
    mon.reset(5)
    assert not mon.is_abandoned(5)


def test_edge_margin_default_is_five_percent():
    assert OwnershipConfig().edge_margin(W, H) == 12


def test_person_roles_are_exclusive():
    p = PersonRecord(1, Trace(1))
    p.make_candidate(4)
    p.make_owner(4)
    assert p.owner_of == {4} and p.candidate_of == set()
    p.make_candidate(4)
    assert p.candidate_of == set()
