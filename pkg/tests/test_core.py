import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sentinel.core import BBox, Clock, ConfigurationError, Frame, Mask, centroid_distance, iou


def boxes(max_xy=40, max_wh=25):
    return st.builds(BBox, st.integers(0, max_xy), st.integers(0, max_xy), st.integers(1, max_wh),
                     st.integers(1, max_wh))


def pixel_iou(a: BBox, b: BBox) -> float:
    """Reference: rasterize both boxes and count pixels."""
    grid = np.zeros((2, 80, 80), bool)
    grid[0, a.y:a.y2, a.x:a.x2] = True
    grid[1, b.y:b.y2, b.x:b.x2] = True
    inter = np.logical_and(grid[0], grid[1]).sum()
    union = np.logical_or(grid[0], grid[1]).sum()
    return inter / union


def test_iou_identical_is_one():
    assert iou(BBox(3, 4, 10, 7), BBox(3, 4, 10, 7)) == 1.0


def test_iou_disjoint_is_zero():
    assert iou(BBox(0, 0, 5, 5), BBox(10, 10, 5, 5)) == 0.0


def test_iou_half_shifted_square():
    assert iou(BBox(0, 0, 10, 10), BBox(5, 0, 10, 10)) == pytest.approx(1 / 3)
    assert pixel_iou(BBox(0, 0, 10, 10), BBox(5, 0, 10, 10)) == pytest.approx(1 / 3)


@given(boxes(), boxes())
def test_iou_matches_pixel_count(a, b):
    assert iou(a, b) == pytest.approx(pixel_iou(a, b), abs=1e-12)


@given(boxes(), boxes())
def test_iou_symmetric_and_bounded(a, b):
    assert iou(a, b) == iou(b, a)
    assert 0.0 <= iou(a, b) <= 1.0
    assert iou(a, a) == 1.0


def test_centroid_distance_examples():
    assert centroid_distance(BBox(0, 0, 2, 2), (1, 1)) == 0.0
    assert centroid_distance(BBox(0, 0, 2, 2), (4, 5)) == 5.0


@given(boxes(200, 100), st.floats(-500, 500), st.floats(-500, 500))
def test_centroid_distance_formula(b, px, py):
    cx, cy = b.x + b.w / 2, b.y + b.h / 2
    assert abs(centroid_distance(b, (px, py)) - math.sqrt((cx - px) ** 2 + (cy - py) ** 2)) < 1e-9


def test_bbox_rejects_degenerate():
    with pytest.raises(ValueError):
        BBox(0, 0, 0, 5)


def test_bbox_clamp():
    assert BBox(-5, -5, 10, 10).clamp(100, 100) == BBox(0, 0, 5, 5)
    assert BBox(95, 0, 10, 10).clamp(100, 100) == BBox(95, 0, 5, 10)
    assert BBox(200, 0, 10, 10).clamp(100, 100) is None


def test_bbox_dilate_stays_in_frame():
    assert BBox(2, 2, 4, 4).dilate(8, 20, 20) == BBox(0, 0, 14, 14)


mask_arrays = arrays(bool, (6, 7))


@settings(max_examples=200)
@given(mask_arrays, mask_arrays, mask_arrays)
def test_mask_boolean_algebra(a, b, c):
    A, B, C = Mask(a), Mask(b), Mask(c)
    full, empty = Mask.full(7, 6), Mask.empty(7, 6)
    assert (A & B) == (B & A) and (A | B) == (B | A)
    assert (A & (B | C)) == ((A & B) | (A & C))
    assert (A | (B & C)) == ((A | B) & (A | C))
    assert ~(A & B) == (~A | ~B) and ~(A | B) == (~A & ~B)
    assert ~~A == A
    assert (A ^ B) == ((A & ~B) | (~A & B))
    assert (A & full) == A and (A | empty) == A
    assert (A & ~A) == empty and (A | ~A) == full


def test_mask_size_mismatch():
    with pytest.raises(ConfigurationError):
        Mask.empty(4, 4) & Mask.empty(5, 4)


def test_mask_coverage_uses_full_box_area():
    m = Mask.from_box(10, 10, BBox(0, 0, 5, 10))
    assert m.coverage(BBox(0, 0, 10, 10)) == 0.5
    # half of this box is off-frame; those pixels count as unset
    assert m.coverage(BBox(-5, 0, 10, 10)) == 0.5


def test_frame_is_immutable_and_validated():
    f = Frame.blank(8, 6, (1, 2, 3), index=50)
    assert (f.width, f.height) == (8, 6)
    assert f.timestamp == 2.0
    with pytest.raises(ValueError):
        f.pixels[0, 0, 0] = 9
    with pytest.raises(ConfigurationError):
        Frame(np.zeros((6, 8), np.uint8))
    assert f.crop(BBox(6, 4, 5, 5)).shape == (2, 2, 3)


def test_clock_exact_conversions():
    c = Clock()
    assert c.frames(30) == 750
    assert c.frames(40) == 1000
    assert c.frames(2) == 50
    assert c.at(750).seconds == 30.0
    assert c.tick().index == 1
    with pytest.raises(ConfigurationError):
        Clock(0)
