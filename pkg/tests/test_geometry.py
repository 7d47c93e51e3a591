import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from danzerkit.geometry import (
    AxisBox,
    DimensionError,
    Segment,
    as_point,
    dist_point_segment,
    rotate_quarter,
    swap_axes,
    torus_dist,
)

coord = st.floats(-50, 50, allow_nan=False)


def test_dist_examples():
    assert dist_point_segment([0, 1], Segment([-1, 0], [1, 0])) == pytest.approx(1.0)
    assert dist_point_segment([2, 0], Segment([-1, 0], [1, 0])) == pytest.approx(1.0)
    assert dist_point_segment([3, 4, 0], Segment([0, 0, 0], [0, 0, 1])) == pytest.approx(5.0)


def test_dist_dimension_mismatch():
    with pytest.raises(DimensionError):
        dist_point_segment([0, 0, 0], Segment([0, 0], [1, 0]))


def test_torus_examples():
    assert torus_dist(0.75) == 0.25
    assert torus_dist(0.5) == 0.5
    assert torus_dist(-1.25) == 0.25
    with pytest.raises(ValueError):
        torus_dist(math.inf)


def test_segment_and_box_validation():
    with pytest.raises(ValueError):
        Segment([1, 2], [1, 2])
    with pytest.raises(DimensionError):
        Segment([0, 0], [1, 1, 1])
    with pytest.raises(ValueError):
        AxisBox([0, 0], [1, 0])
    with pytest.raises(DimensionError):
        as_point([1.0])
    with pytest.raises(ValueError):
        as_point([0.0, math.nan])


def test_box_basics():
    b = AxisBox.from_bounds([-1, 1, 0, 3])
    assert b.volume == 6.0
    assert b.reach == 3.0
    assert b.contains([[1, 3], [0, 0], [1.1, 1]]).tolist() == [True, True, False]
    assert AxisBox.cube(3, 0, 2).volume == 8.0


def test_rotate_and_swap():
    assert rotate_quarter([[1, 2]]).tolist() == [[-2, 1]]
    assert swap_axes([[1, 2, 3]], 3).tolist() == [[3, 2, 1]]
    assert swap_axes([[1, 2, 3]], 1).tolist() == [[1, 2, 3]]


@given(st.lists(coord, min_size=6, max_size=6))
def test_dist_at_most_endpoint_distance(v):
    p, a, b = np.array(v[0:2]), np.array(v[2:4]), np.array(v[4:6])
    if np.array_equal(a, b):
        return
    d = dist_point_segment(p, Segment(a, b))
    assert d <= min(np.linalg.norm(p - a), np.linalg.norm(p - b)) + 1e-9


@settings(max_examples=50)
@given(st.lists(coord, min_size=9, max_size=9), st.lists(coord, min_size=3, max_size=3), st.permutations([0, 1, 2]))
def test_dist_translation_and_permutation_invariant(v, shift, perm):
    p, a, b = np.array(v[0:3]), np.array(v[3:6]), np.array(v[6:9])
    if np.array_equal(a, b):
        return
    d = dist_point_segment(p, Segment(a, b))
    t = np.array(shift)
    assert dist_point_segment(p + t, Segment(a + t, b + t)) == pytest.approx(d, abs=1e-7)
    perm = list(perm)
    assert dist_point_segment(p[perm], Segment(a[perm], b[perm])) == pytest.approx(d, abs=1e-9)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_torus_symmetries(x):
    assert 0 <= torus_dist(x) <= 0.5
    assert torus_dist(x) == pytest.approx(torus_dist(x + 1), abs=1e-9)
    assert torus_dist(x) == pytest.approx(torus_dist(-x), abs=1e-9)
