import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sentinel.background import (DualBackground, NotReady, ObjectMotionState, Which, classify_motion, cleanup,
                                 static_regions)
from sentinel.config import BackgroundConfig
from sentinel.core import BBox, ConfigurationError, Frame, Mask

W, H = 32, 24
GRAY = (100, 100, 100)


def frame(index, color=GRAY, rect=None, rect_color=(200, 30, 30)):
    px = np.empty((H, W, 3), np.uint8)
    px[:] = color
    if rect is not None:
        px[rect.y:rect.y2, rect.x:rect.x2] = rect_color
    return Frame(px, index)


def test_foreground_before_any_frame():
    bg = DualBackground(W, H)
    with pytest.raises(NotReady):
        bg.foreground(frame(0), Which.LONG)


def test_dimension_mismatch():
    bg = DualBackground(W, H)
    with pytest.raises(ConfigurationError):
        bg.ingest(Frame.blank(W + 1, H))


def test_constant_frames_fill_every_sample():
    bg = DualBackground(W, H)
    ref = frame(0).pixels
    for i in range(1000):
        bg.ingest(frame(i))
    for model in (bg.long, bg.short):
        assert np.all(model.samples == ref[None])


def test_off_cadence_frame_changes_nothing():
    bg = DualBackground(W, H)
    bg.ingest(frame(0))
    before_long, before_short = bg.long.samples.copy(), bg.short.samples.copy()
    bg.ingest(frame(49, color=(5, 5, 5)))  # 49 is on neither cadence
    assert np.array_equal(bg.long.samples, before_long)
    assert np.array_equal(bg.short.samples, before_short)


def test_ring_buffer_matches_replay_oracle():
    """Pixel (0,0) changes color at frame 500; replay the buffer with a plain list."""
    bg = DualBackground(W, H)
    old, new = (100, 100, 100), (10, 200, 10)
    oracle = [old] * 20
    ptr = 0
    mixed_until = None
    for i in range(1600):
        c = old if i < 500 else new
        bg.ingest(frame(i, color=c))
        if i % 50 == 0:
            oracle[ptr] = c
            ptr = (ptr + 1) % 20
        got = [tuple(int(v) for v in s[0, 0]) for s in bg.long.samples]
        assert sorted(got) == sorted(oracle)
        if new in got and old in got:
            mixed_until = i
    assert mixed_until == 1449
    assert all(tuple(int(v) for v in s[0, 0]) == new for s in bg.long.samples)


def test_constant_scene_has_no_foreground():
    bg = DualBackground(W, H)
    for i in range(10):
        bg.ingest(frame(i))
    assert not bg.foreground(frame(10), Which.LONG).any()
    assert not bg.foreground(frame(10), Which.SHORT).any()


def test_painted_rectangle_is_the_foreground():
    bg = DualBackground(W, H)
    for i in range(100):
        bg.ingest(frame(i))
    rect = BBox(5, 6, 8, 7)
    f = frame(100, rect=rect)
    bg.ingest(f)
    fl = bg.foreground(f, Which.LONG)
    expected = Mask(bg.long.naive_foreground(f.pixels))
    assert fl == expected
    assert cleanup(fl) == Mask.from_box(W, H, rect)


def test_rectangle_present_from_start_is_background():
    bg = DualBackground(W, H)
    rect = BBox(5, 6, 8, 7)
    for i in range(200):
        f = frame(i, rect=rect)
        bg.ingest(f)
    assert not bg.foreground(f, Which.LONG).any()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, W - 6), st.integers(0, H - 6)), min_size=5, max_size=40),
       st.integers(1, 20))
def test_incremental_foreground_matches_naive(script, consensus):
    """Cached match counts must agree with a full recount on every frame."""
    cfg = BackgroundConfig(long_interval=4, short_interval=2, samples=6, min_consensus=min(consensus, 6))
    bg = DualBackground(W, H, cfg)
    colors = [(200, 30, 30), (30, 200, 30), (30, 30, 200)]
    for i, (c, x, y) in enumerate(script):
        f = frame(i, rect=BBox(x, y, 6, 6), rect_color=colors[c])
        bg.ingest(f)
        for model in (bg.long, bg.short):
            assert np.array_equal(model.foreground(f.pixels), model.naive_foreground(f.pixels))


def test_unchanging_scene_absorbed_after_1000_frames():
    bg = DualBackground(W, H)
    rect = BBox(10, 10, 6, 6)
    for i in range(1100):
        f = frame(i, rect=rect if i >= 60 else None)
        bg.ingest(f)
        fl = bg.foreground(f, Which.LONG)
    assert not fl.any()


grid = arrays(bool, (8, 8))


def test_static_regions_examples():
    a = np.zeros((8, 8), bool)
    a[:4] = True
    b = np.zeros((8, 8), bool)
    b[:, :4] = True
    f_long, f_short = Mask(a | b), Mask(b)
    assert static_regions(f_long, f_long) == Mask.empty(8, 8)
    assert static_regions(Mask.full(8, 8), Mask.empty(8, 8)) == Mask.full(8, 8)
    assert static_regions(f_long, f_short) == Mask(a & ~b)


@given(grid, grid)
def test_static_regions_inside_long_and_outside_short(a, b):
    s = static_regions(Mask(a), Mask(b))
    assert not np.any(s.bits & ~a)
    assert not np.any(s.bits & b)


def test_static_regions_size_mismatch():
    with pytest.raises(ConfigurationError):
        static_regions(Mask.empty(8, 8), Mask.empty(8, 9))


def test_classify_motion_three_states():
    box = BBox(2, 2, 4, 4)
    inside = Mask.from_box(10, 10, box)
    empty = Mask.empty(10, 10)
    assert classify_motion(box, inside, empty) is ObjectMotionState.STATIC
    assert classify_motion(box, inside, inside) is ObjectMotionState.MOVING
    assert classify_motion(box, empty, empty) is ObjectMotionState.LONG_STATIC
