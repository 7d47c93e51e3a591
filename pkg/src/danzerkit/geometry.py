"""Geometric primitives shared by the constructions and the verifiers.

Points are plain float64 numpy vectors; batches of points are ``(n, d)`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Global predicate tolerance for floating-point geometry.
TOL = 1e-9


class DimensionError(ValueError):
    """Arguments live in different dimensions."""


def as_point(coords, dim: int | None = None) -> np.ndarray:
    """Validate ``coords`` as a point of R^d (d >= 2, finite) and return it as an array."""
    p = np.asarray(coords, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise DimensionError(f"a point needs at least 2 coordinates, got shape {p.shape}")
    if dim is not None and p.size != dim:
        raise DimensionError(f"expected a point of dimension {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite coordinate in {coords!r}")
    return p


@dataclass(frozen=True, eq=False)
class Segment:
    """Directed segment from ``a`` to ``b`` with ``a != b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_point(self.a)
        b = as_point(self.b, a.size)
        if np.array_equal(a, b):
            raise ValueError("degenerate segment: a == b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.size

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def __repr__(self):
        return f"Segment(a={self.a.tolist()}, b={self.b.tolist()})"


@dataclass(frozen=True, eq=False)
class AxisBox:
    """Closed axis-parallel box ``prod [lo_i, hi_i]`` of positive volume."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_point(self.lo)
        hi = as_point(self.hi, lo.size)
        if not np.all(lo < hi):
            raise ValueError(f"box needs lo < hi on every axis, got lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_bounds(cls, bounds) -> "AxisBox":
        """Build from a flat ``[lo1, hi1, lo2, hi2, ...]`` list."""
        b = np.asarray(bounds, dtype=np.float64).reshape(-1, 2)
        return cls(b[:, 0], b[:, 1])

    @classmethod
    def cube(cls, dim: int, lo: float, hi: float) -> "AxisBox":
        return cls(np.full(dim, lo, dtype=np.float64), np.full(dim, hi, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def extents(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))

    @property
    def reach(self) -> float:
        """Largest absolute coordinate attained in the box."""
        return float(max(np.max(np.abs(self.lo)), np.max(np.abs(self.hi))))

    def expanded(self, margin: float) -> "AxisBox":
        return AxisBox(self.lo - margin, self.hi + margin)

    def contains(self, points, tol: float = TOL) -> np.ndarray:
        """Boolean mask of points inside the closed box (boundary counts as inside)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def __eq__(self, other):
        if not isinstance(other, AxisBox):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self):
        return f"AxisBox(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


def dist_point_segment(p, s: Segment) -> float:
    """Euclidean distance from point ``p`` to the closed segment ``s``."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != s.a.shape:
        raise DimensionError(f"point of dimension {p.size} vs segment of dimension {s.dim}")
    v = s.b - s.a
    w = p - s.a
    c1 = float(np.dot(w, v))
    if c1 <= 0.0:
        return float(np.linalg.norm(w))
    c2 = float(np.dot(v, v))
    if c2 <= c1:
        return float(np.linalg.norm(p - s.b))
    return float(np.linalg.norm(w - (c1 / c2) * v))


def torus_dist(x: float) -> float:
    """Distance from ``x`` to the nearest integer."""
    if not math.isfinite(x):
        raise ValueError("torus_dist needs a finite argument")
    f = x - math.floor(x)
    return min(f, 1.0 - f)


def rotate_quarter(points) -> np.ndarray:
    """Rotation by pi/2 about the origin: (x, y) -> (-y, x)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return np.column_stack([-pts[:, 1], pts[:, 0]])


def swap_axes(points, i: int) -> np.ndarray:
    """Exchange the first and the ``i``-th coordinate (1-based ``i``)."""
    pts = np.array(points, dtype=np.float64, copy=True)
    if i != 1:
        pts[:, [0, i - 1]] = pts[:, [i - 1, 0]]
    return pts
