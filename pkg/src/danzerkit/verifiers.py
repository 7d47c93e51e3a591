"""Verification engines: visibility probes and curves, empty-box searches, growth fits.

Visibility sources can be

* a finite ``(n, d)`` point array (brute force over all points),
* a :class:`~danzerkit.lattice.ForestSpec` (exact distance to the infinite forest
  through its hyperplane lattices), or
* a :class:`~danzerkit.peres.PeresForest` (exact distance through a value table).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import TOL, AxisBox, Segment
from .lattice import ForestSpec
from . import kernels


# ---------------------------------------------------------------------------
# segment sampling
# ---------------------------------------------------------------------------


def _directions(d: int) -> np.ndarray:
    """Axis directions, main diagonals and a few skew slopes."""
    dirs = [np.eye(d)[a] for a in range(d)]
    signs = np.array(np.meshgrid(*[[1.0, -1.0]] * (d - 1), indexing="ij")).reshape(d - 1, -1).T
    for sg in signs:
        dirs.append(np.concatenate(([1.0], sg)))
    for a in range(1, d):
        v = np.zeros(d)
        v[0], v[a] = 2.0, 1.0
        dirs.append(v)
        v = np.zeros(d)
        v[0], v[a] = 1.0, 2.0
        dirs.append(v)
    out = np.array(dirs)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


@dataclass(frozen=True)
class SegmentSampler:
    """Deterministic finite witness set of segments of one length inside ``region``.

    Random part: ``count`` segments with midpoints uniform in ``region`` shrunk
    by ``length/2`` and uniformly random directions, drawn from
    ``numpy.random.default_rng(seed)``.  Midpoints and directions are drawn
    before the length is applied, so samplers differing only in ``length``
    (with region grown by half the length) produce nested segments.

    Adversarial part (``include_adversarial``): axis-parallel, diagonal and
    skew segments centred at anchor points built from ``hints`` (lattice
    spacings): half-spacings, third-spacings and generic offsets.  Axis-parallel
    ones at half-spacing offsets run midway between hyperplanes; the others
    straddle hyperplanes at fine-cell centres.
    """

    seed: int
    count: int
    length: float
    region: AxisBox
    include_adversarial: bool = True
    hints: tuple = field(default=())

    def __post_init__(self):
        if self.count < 0 or not self.length > 0:
            raise ValueError("need count >= 0 and positive length")

    def _anchors(self) -> np.ndarray:
        vals = {0.0, 1.0 / 3.0, 0.1234567, -0.4142136}
        for h in self.hints:
            h = float(h)
            vals.update({h / 2, h / 3, h / 4, -h / 2, h / 2 + 1.0 / 3.0})
        return np.array(sorted(vals))

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.region.dim
        lo, hi = self.region.lo, self.region.hi
        half = self.length / 2.0
        rng = np.random.default_rng(self.seed)
        u = rng.random((self.count, d))
        g = rng.standard_normal((self.count, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        inner_lo = np.minimum(lo + half, (lo + hi) / 2)
        inner_hi = np.maximum(hi - half, (lo + hi) / 2)
        mids = inner_lo + u * (inner_hi - inner_lo)
        A = [mids - half * g]
        B = [mids + half * g]
        if self.include_adversarial:
            dirs = _directions(d)
            anchors = self._anchors()
            generic = 0.2718282
            pts = []
            for s in anchors:
                pts.append(np.full(d, s))
                p = np.full(d, generic)
                p[0] = s
                pts.append(p)
                p = np.full(d, s)
                p[0] = generic
                pts.append(p)
            pts = np.array(pts)
            for v in dirs:
                ext = half * np.abs(v)
                c_lo = np.minimum(lo + ext, (lo + hi) / 2)
                c_hi = np.maximum(hi - ext, (lo + hi) / 2)
                m = np.clip(pts, c_lo, c_hi)
                A.append(m - half * v)
                B.append(m + half * v)
        return np.concatenate(A), np.concatenate(B)

    def __len__(self):
        return self.segments()[0].shape[0]


# ---------------------------------------------------------------------------
# visibility
# ---------------------------------------------------------------------------


def _as_source(source):
    if isinstance(source, ForestSpec) or hasattr(source, "segment_distances"):
        return source
    pts = np.atleast_2d(np.asarray(source, dtype=np.float64))
    if pts.size == 0 or pts.shape[0] == 0:
        raise ValueError("visibility of an empty point set is vacuous")
    return pts


def segment_distances(source, A, B, region: AxisBox, r0: float, stop: float = -1.0, backend=None) -> np.ndarray:
    """Distance from each segment to the source (see module docstring)."""
    src = _as_source(source)
    if isinstance(src, np.ndarray):
        if src.shape[1] != A.shape[1]:
            raise ValueError(f"points of dimension {src.shape[1]} vs segments of dimension {A.shape[1]}")
        return kernels.min_dist_points(src, A, B, backend=backend)
    if isinstance(src, ForestSpec):
        rmax = src.covering_radius()
        fib = src.fibers(region.expanded(rmax + 1.0))
        if fib[1].size == 0:
            raise ValueError("no forest hyperplane meets the probe region")
        return kernels.min_dist_fibers(A, B, fib, r0, rmax, stop=stop, backend=backend)
    return src.segment_distances(A, B, r0, stop=stop, backend=backend)


@dataclass(frozen=True, eq=False)
class VisibilityReport:
    epsilon: float
    segment_length: float
    worst_min_distance: float
    witness_segment: Segment
    passed: bool
    n_segments: int
    exact: bool = True

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "segment_length": self.segment_length,
            "worst_min_distance": self.worst_min_distance,
            "witness_segment": [self.witness_segment.a.tolist(), self.witness_segment.b.tolist()],
            "n_segments": self.n_segments,
            "exact": self.exact,
            "pass": self.passed,
        }


def visibility_probe(source, sampler: SegmentSampler, epsilon: float, early_exit: bool = False,
                     backend=None) -> VisibilityReport:
    """Worst, over the sampled segments, of the distance to the nearest source point.

    ``pass`` iff the worst distance is at most ``epsilon + 1e-9``.  With
    ``early_exit`` each segment stops at the first point within ``epsilon``;
    the verdict is unchanged but a passing worst distance is then only an
    upper bound (``exact`` is False).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    A, B = sampler.segments()
    if A.shape[0] == 0:
        raise ValueError("sampler produced no segments")
    stop = epsilon if early_exit else -1.0
    dist = segment_distances(source, A, B, sampler.region, r0=epsilon, stop=stop, backend=backend)
    w = int(np.argmax(dist))
    worst = float(dist[w])
    passed = worst <= epsilon + TOL
    return VisibilityReport(
        epsilon=float(epsilon),
        segment_length=float(sampler.length),
        worst_min_distance=worst,
        witness_segment=Segment(A[w], B[w]),
        passed=passed,
        n_segments=int(A.shape[0]),
        exact=not (early_exit and passed),
    )


@dataclass(frozen=True)
class CurvePoint:
    epsilon: float
    length: float | None  # None: no ladder length passed (unbounded)
    probes: int


def geometric_ladder(start: float, ratio: float, steps: int) -> list[float]:
    if not (start > 0 and ratio > 1 and steps >= 1):
        raise ValueError("ladder needs start > 0, ratio > 1, steps >= 1")
    return [start * ratio**q for q in range(steps)]


def empirical_visibility_curve(source, epsilons: Sequence[float], base: AxisBox, ladder: Sequence[float],
                               seed: int = 0, count: int = 200, include_adversarial: bool = True,
                               hints: tuple = (), backend=None) -> list[CurvePoint]:
    """Smallest ladder length whose probe passes, for each ``epsilon``.

    Segments of length ``L`` have midpoints in ``base`` (the sampler region is
    ``base`` grown by ``L/2``), so the witness sets are nested in ``L`` and
    passing is monotone along the ladder.  The top of the ladder is probed
    first; if it fails the entry is recorded as unbounded.  Lengths must come
    out non-decreasing as ``epsilon`` decreases; this is asserted.
    """
    eps = [float(e) for e in epsilons]
    if any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    lad = sorted(float(x) for x in ladder)
    out: list[CurvePoint] = []
    for e in eps:
        def passes(q: int) -> bool:
            L = lad[q]
            smp = SegmentSampler(seed, count, L, base.expanded(L / 2), include_adversarial, hints)
            return visibility_probe(source, smp, e, early_exit=True, backend=backend).passed

        probes = 1
        if not passes(len(lad) - 1):
            out.append(CurvePoint(e, None, probes))
            continue
        lo, hi = -1, len(lad) - 1  # passes(hi) holds
        while hi - lo > 1:
            mid = (lo + hi) // 2
            probes += 1
            if passes(mid):
                hi = mid
            else:
                lo = mid
        out.append(CurvePoint(e, lad[hi], probes))
    lengths = [c.length if c.length is not None else math.inf for c in out]
    assert all(a <= b for a, b in zip(lengths, lengths[1:])), "visibility curve not monotone"
    return out


def curve_baseline(curve: Sequence[CurvePoint], d: int) -> dict:
    """``length * eps^(d-1)`` per curve entry and its minimum (lower-bound baseline)."""
    ratios = [None if c.length is None else c.length * c.epsilon ** (d - 1) for c in curve]
    finite = [r for r in ratios if r is not None]
    return {
        "ratios": ratios,
        "min_ratio": min(finite) if finite else None,
        "all_finite": len(finite) == len(ratios),
    }


def curve_fit_exponent(curve: Sequence[CurvePoint]) -> tuple[float, float] | None:
    """Least-squares fit ``length ~ C eps^-p``; returns ``(C, p)``."""
    pts = [(c.epsilon, c.length) for c in curve if c.length is not None]
    if len(pts) < 2:
        return None
    x = -np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    p, logc = np.polyfit(x, y, 1)
    return float(math.exp(logc)), float(p)


def format_curve_csv(curve: Sequence[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epsilon", "length"])
    for c in curve:
        w.writerow([repr(c.epsilon), "inf" if c.length is None else repr(c.length)])
    return buf.getvalue()


def dumps_report(obj) -> str:
    """Deterministic JSON for reports (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# empty boxes
# ---------------------------------------------------------------------------


UNIT_SQUARE = (-0.5, 0.5, -0.5, 0.5)


@dataclass(frozen=True, eq=False)
class EmptyBox:
    volume: float
    box: AxisBox
    exact: bool
    resolution: int | None = None

    def as_dict(self) -> dict:
        return {
            "volume": self.volume,
            "box": [self.box.lo.tolist(), self.box.hi.tolist()],
            "exact": self.exact,
            "resolution": self.resolution,
        }


def largest_empty_rectangle_2d(points, bounds=UNIT_SQUARE, backend=None) -> EmptyBox:
    """Exact largest open axis-parallel rectangle inside ``bounds`` avoiding all points.

    Points on the rectangle's boundary are allowed.  Default bounds are
    ``I^2 = [-1/2, 1/2]^2``.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x0, x1, y0, y1 = bounds
    inside = (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
    if not np.all(inside):
        raise ValueError("points must lie in the closed bounds")
    area, (bx0, bx1, by0, by1) = kernels.largest_empty_rectangle(pts[:, 0], pts[:, 1], bounds, backend=backend)
    return EmptyBox(area, AxisBox([bx0, by0], [bx1, by1]), exact=True)


def _open_interior_hits(points: np.ndarray, box: AxisBox) -> int:
    return int(np.count_nonzero(np.all((points > box.lo) & (points < box.hi), axis=1)))


def empty_box_search_nd(points, d: int, resolution: int = 16, backend=None) -> EmptyBox:
    """Heuristic search for large empty boxes of ``I^d`` with ``d-1`` equal sides.

    For every long axis, every square cross-section on a ``1/resolution``
    grid is scanned and the longest empty stretch along the long axis is
    taken.  The result is a lower bound on the true supremum (non-certifying).
    ``d = 2`` delegates to the exact sweep.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, d)
    if d == 2:
        return largest_empty_rectangle_2d(pts, backend=backend)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    G = int(resolution)
    best_vol, best_box = 0.0, None
    for a in range(d):
        others = [q for q in range(d) if q != a]
        P = pts[:, others]
        along = pts[:, a]
        for k in range(1, G + 1):
            side = k / G
            starts = -0.5 + np.arange(G - k + 1) / G
            grids = np.meshgrid(*[starts] * (d - 1), indexing="ij")
            corners = np.column_stack([g.ravel() for g in grids])
            for c in corners:
                inside = np.all((P > c) & (P < c + side), axis=1)
                z = np.sort(along[inside])
                walls = np.concatenate(([-0.5], z, [0.5]))
                gaps = np.diff(walls)
                q = int(np.argmax(gaps))
                vol = gaps[q] * side ** (d - 1)
                if vol > best_vol and gaps[q] > 0:
                    lo = np.empty(d)
                    hi = np.empty(d)
                    lo[a], hi[a] = walls[q], walls[q + 1]
                    lo[others], hi[others] = c, c + side
                    best_vol, best_box = float(vol), AxisBox(lo, hi)
    if best_box is None:
        raise ValueError("no empty box found at this resolution")
    assert _open_interior_hits(pts, best_box) == 0, "reported box contains an input point"
    return EmptyBox(best_vol, best_box, exact=False, resolution=G)


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    T: list
    counts: list
    ratio_d: list
    ratio_d_log: list

    @property
    def band_d(self) -> float:
        return max(self.ratio_d) / min(self.ratio_d)

    @property
    def band_d_log(self) -> float:
        return max(self.ratio_d_log) / min(self.ratio_d_log)

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "counts": self.counts,
            "ratio_d": self.ratio_d,
            "ratio_d_log": self.ratio_d_log,
            "band_d": self.band_d,
            "band_d_log": self.band_d_log,
        }


def growth_fit(count_fn: Callable[[float], int], T_ladder: Sequence[float], d: int) -> GrowthReport:
    """``count/T^d`` and ``count/(T^d ln T)`` along an increasing ladder (``T > 1``)."""
    T = [float(t) for t in T_ladder]
    if any(a >= b for a, b in zip(T, T[1:])) or not T or T[0] <= 1:
        raise ValueError("ladder must be increasing with T > 1")
    counts = [int(count_fn(t)) for t in T]
    rd = [c / t**d for c, t in zip(counts, T)]
    rl = [c / (t**d * math.log(t)) for c, t in zip(counts, T)]
    return GrowthReport(T, counts, rd, rl)
