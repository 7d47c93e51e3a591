import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from danzerkit.geometry import AxisBox, Segment, dist_point_segment
from danzerkit.lattice import corollary_forest_spec, enumerate_points
from danzerkit.verifiers import (
    CurvePoint,
    SegmentSampler,
    curve_baseline,
    curve_fit_exponent,
    dumps_report,
    empirical_visibility_curve,
    empty_box_search_nd,
    format_curve_csv,
    geometric_ladder,
    growth_fit,
    largest_empty_rectangle_2d,
    visibility_probe,
)


def _grid(lo, hi):
    g = np.arange(lo, hi + 1, dtype=float)
    return np.array(np.meshgrid(g, g, indexing="ij")).reshape(2, -1).T


Z10 = _grid(0, 10)


def test_sampler_deterministic_and_inside():
    region = AxisBox.cube(2, 0, 10)
    s = SegmentSampler(42, 100, 2.0, region, True, (1.0,))
    A1, B1 = s.segments()
    A2, B2 = SegmentSampler(42, 100, 2.0, region, True, (1.0,)).segments()
    assert np.array_equal(A1, A2) and np.array_equal(B1, B2)
    assert np.allclose(np.linalg.norm(B1 - A1, axis=1), 2.0)
    assert np.all(region.contains(A1)) and np.all(region.contains(B1))
    A3, _ = SegmentSampler(43, 100, 2.0, region, True, (1.0,)).segments()
    assert not np.array_equal(A1, A3)
    assert len(SegmentSampler(1, 5, 1.0, region, False)) == 5


def test_sampler_nested_across_lengths():
    base = AxisBox.cube(2, -3, 3)
    A1, B1 = SegmentSampler(9, 50, 2.0, base.expanded(1.0), False).segments()
    A2, B2 = SegmentSampler(9, 50, 8.0, base.expanded(4.0), False).segments()
    assert np.allclose((A1 + B1) / 2, (A2 + B2) / 2)


def test_probe_integer_grid():
    s = SegmentSampler(1, 300, 2.0, AxisBox.cube(2, 0, 10), True, (1.0,))
    r = visibility_probe(Z10, s, 0.8)
    assert r.passed and r.worst_min_distance <= math.sqrt(2) / 2 + 1e-12
    assert r.n_segments > 300
    assert dist_point_segment(Z10[0], r.witness_segment) >= 0
    assert r.as_dict()["pass"] is True


def test_probe_single_point():
    region = AxisBox.cube(2, -1, 1)
    s = SegmentSampler(0, 0, 1.0, region, True)
    r = visibility_probe([[0.0, 0.0]], s, 0.1)
    assert r.worst_min_distance >= 0
    # one segment through the point
    seg = SegmentSampler(0, 1, 1.0, AxisBox.cube(2, -0.5, 0.5), False)
    A, B = seg.segments()
    mid = (A[0] + B[0]) / 2
    r = visibility_probe([mid], seg, 0.1)
    assert r.worst_min_distance == pytest.approx(0.0, abs=1e-12)


def test_probe_errors():
    s = SegmentSampler(0, 3, 1.0, AxisBox.cube(2, 0, 5))
    with pytest.raises(ValueError):
        visibility_probe(np.empty((0, 2)), s, 0.5)
    with pytest.raises(ValueError):
        visibility_probe(Z10, s, 0.0)
    with pytest.raises(ValueError):
        visibility_probe(np.zeros((3, 3)), s, 0.5)


def test_probe_monotonicity():
    s = SegmentSampler(4, 200, 1.5, AxisBox.cube(2, 0, 10), True, (1.0,))
    sub = Z10[::2]
    r_sub = visibility_probe(sub, s, 0.5)
    r_all = visibility_probe(Z10, s, 0.5)
    assert r_all.worst_min_distance <= r_sub.worst_min_distance
    for e in (0.3, 0.5, 0.7, 1.0):
        a = visibility_probe(Z10, s, e).passed
        b = visibility_probe(Z10, s, e + 0.2).passed
        assert not (a and not b)


def test_curve_integer_lattice():
    Z = _grid(-40, 40)
    base = AxisBox.cube(2, -4, 4)
    lad = geometric_ladder(0.25, math.sqrt(2), 14)
    curve = empirical_visibility_curve(Z, [0.5], base, lad, seed=1, count=200, hints=(1.0,))
    assert curve[0].length is not None and curve[0].length <= 2.0
    big = empirical_visibility_curve(Z, [50.0], base, lad, seed=1, count=50)
    assert big[0].length == lad[0]


def test_curve_unbounded_and_order():
    Z = _grid(-20, 20)
    lad = geometric_ladder(0.25, 2.0, 4)
    curve = empirical_visibility_curve(Z, [0.4, 0.01], AxisBox.cube(2, -2, 2), lad, seed=0, count=50)
    assert curve[1].length is None
    assert curve_baseline(curve, 2)["all_finite"] is False
    with pytest.raises(ValueError):
        empirical_visibility_curve(Z, [0.1, 0.2], AxisBox.cube(2, -2, 2), lad)


def test_curve_exact_forest_and_outputs():
    spec = corollary_forest_spec(2, 1.0)
    lad = geometric_ladder(1.0, math.sqrt(2), 30)
    eps = [2.0**-k for k in range(1, 5)]
    curve = empirical_visibility_curve(spec, eps, AxisBox.cube(2, -8, 8), lad, seed=2, count=100,
                                       hints=(2.0, 0.5, 4.0, 0.25, 40.0, 0.125, 144.0, 0.0625))
    # the hitting length 2 sqrt(2) V(e_j) always suffices
    for c, j in zip(curve, range(1, 5)):
        assert c.length <= spec.hitting_length(j) * math.sqrt(2)
    base = curve_baseline(curve, 2)
    assert base["all_finite"] and base["min_ratio"] > 0
    C, p = curve_fit_exponent(curve)
    assert C > 0 and p > 0
    text = format_curve_csv(curve)
    assert text.splitlines()[0] == "epsilon,length"
    assert len(text.splitlines()) == 5
    assert dumps_report({"b": 1, "a": [1.0]}) == '{\n  "a": [\n    1.0\n  ],\n  "b": 1\n}\n'


def test_curve_fit_needs_two_points():
    assert curve_fit_exponent([CurvePoint(0.5, 2.0, 1)]) is None
    C, p = curve_fit_exponent([CurvePoint(0.5, 8.0, 1), CurvePoint(0.25, 32.0, 1)])
    assert p == pytest.approx(2.0) and C == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# empty rectangles
# ---------------------------------------------------------------------------


def test_ler_examples():
    r = largest_empty_rectangle_2d(np.empty((0, 2)))
    assert r.volume == 1.0 and r.box == AxisBox.cube(2, -0.5, 0.5)
    assert largest_empty_rectangle_2d([[0.0, 0.0]]).volume == 0.5
    assert largest_empty_rectangle_2d([[-0.25, 0.0], [0.25, 0.0]]).volume == 0.5
    with pytest.raises(ValueError):
        largest_empty_rectangle_2d([[0.7, 0.0]])


def _ler_bruteforce(pts, x0=-0.5, x1=0.5, y0=-0.5, y1=0.5):
    """All rectangles with edges on point coordinates or walls."""
    xs = sorted(set([x0, x1] + [p[0] for p in pts]))
    best = 0.0
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            xa, xb = xs[a], xs[b]
            ys = sorted([y0, y1] + [p[1] for p in pts if xa < p[0] < xb])
            for ya, yb in zip(ys, ys[1:]):
                best = max(best, (xb - xa) * (yb - ya))
    return best


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_ler_against_bruteforce(backend):
    rng = np.random.default_rng(11)
    for trial in range(60):
        n = int(rng.integers(1, 41))
        if trial % 3 == 0:
            pts = rng.integers(-4, 5, (n, 2)) / 8.0  # many ties
        else:
            pts = rng.uniform(-0.5, 0.5, (n, 2))
        got = largest_empty_rectangle_2d(pts, backend=backend)
        assert got.volume == pytest.approx(_ler_bruteforce(pts.tolist()), abs=1e-12)
        inside = np.all((pts > got.box.lo) & (pts < got.box.hi), axis=1)
        assert not inside.any()
        assert got.box.volume == pytest.approx(got.volume)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)), min_size=1, max_size=25))
def test_ler_property(pts):
    got = largest_empty_rectangle_2d(pts)
    assert got.volume == pytest.approx(_ler_bruteforce(pts), abs=1e-12)


def test_empty_box_search_examples():
    r = empty_box_search_nd(np.empty((0, 3)), 3, resolution=4)
    assert r.volume == 1.0 and r.box == AxisBox.cube(3, -0.5, 0.5)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.5, 0.5, (3000, 3))
    eps = 0.01
    # plant an empty constrained box (two equal sides on the search grid) of volume 2 eps
    box = AxisBox([-0.5, -0.5, -0.5], [0.32 - 0.5, 0.25 - 0.5, 0.25 - 0.5])
    assert box.volume == pytest.approx(2 * eps)
    kept = pts[~np.all((pts > box.lo) & (pts < box.hi), axis=1)]
    found = empty_box_search_nd(kept, 3, resolution=8)
    assert found.volume >= eps
    assert not np.any(np.all((kept > found.box.lo) & (kept < found.box.hi), axis=1))
    assert found.resolution == 8 and not found.exact
    assert empty_box_search_nd([[0.0, 0.0]], 2).exact


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------


def test_growth_fit_floor():
    T = [4.0, 8.0, 16.0, 32.0]
    rep = growth_fit(lambda t: math.floor(t) ** 2, T, 2)
    assert all((1 - 1 / T[0]) ** 2 <= r <= 1 for r in rep.ratio_d)
    assert rep.band_d == pytest.approx(1.0)
    assert rep.as_dict()["counts"] == [16, 64, 256, 1024]
    with pytest.raises(ValueError):
        growth_fit(lambda t: 1, [4.0, 2.0], 2)


def test_growth_fit_forest_vs_series_bound():
    from danzerkit.lattice import count_in_ball, layer_for_radius, series_density_bound

    spec = corollary_forest_spec(2, 1.0)
    T = [4.0, 8.0, 16.0, 32.0, 64.0]
    rep = growth_fit(lambda t: count_in_ball(spec, t), T, 2)
    for t, r in zip(T, rep.ratio_d):
        assert r <= series_density_bound(spec, layer_for_radius(spec, t))
