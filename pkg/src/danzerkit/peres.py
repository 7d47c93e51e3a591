"""Planar Peres-type forests ``F(a) = F1(a) u R(F1(a))``.

``F1(a) = {(k, a_|k| + l) : k != 0, l in Z}`` puts one shifted copy of the
integers on every nonzero column; ``R`` is the quarter turn
``(x, y) -> (-y, x)``, which turns columns into rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import AxisBox
from .lattice import DEFAULT_BUDGET, BudgetExceeded, dedup_points
from . import kernels, sud

GOLDEN = "golden"
SUD_DIGITAL = "sud-digital"
USER = "user-supplied"

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def golden_sequence(n: int) -> float:
    """``(n/2) phi mod 1`` for even ``n``, ``0`` for odd ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    if n % 2:
        return 0.0
    return math.fmod((n // 2) * PHI, 1.0)


def golden_table(n_max: int) -> np.ndarray:
    """``t[n] = golden_sequence(n)`` for ``1 <= n <= n_max``."""
    n = np.arange(n_max + 1)
    return np.where(n % 2 == 0, np.fmod((n // 2) * PHI, 1.0), 0.0)


def sud_table(n_max: int) -> np.ndarray:
    return sud.u_floats(n_max)


@dataclass(frozen=True)
class PeresSpec:
    """Which sequence drives the forest and which window to emit.

    ``sequence`` is required for the user-supplied kind: either a callable
    ``n -> a_n`` or an array indexed so that ``sequence[n]`` is ``a_n``.
    """

    sequence_kind: str
    window: AxisBox
    sequence: Callable[[int], float] | np.ndarray | None = field(default=None, repr=False)
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.sequence_kind not in (GOLDEN, SUD_DIGITAL, USER):
            raise ValueError(f"unknown sequence kind {self.sequence_kind!r}")
        if self.window.dim != 2:
            raise ValueError("Peres forests are planar")
        if self.sequence_kind == USER and self.sequence is None:
            raise ValueError("a user-supplied forest needs a sequence")

    def table(self, n_max: int) -> np.ndarray:
        return sequence_table(self.sequence_kind, n_max, self.sequence)


def sequence_table(kind: str, n_max: int, sequence=None) -> np.ndarray:
    if kind == GOLDEN:
        return golden_table(n_max)
    if kind == SUD_DIGITAL:
        return sud_table(n_max)
    if callable(sequence):
        t = np.zeros(n_max + 1)
        for n in range(1, n_max + 1):
            t[n] = float(sequence(n)) % 1.0
        return t
    arr = np.asarray(sequence, dtype=np.float64)
    if arr.shape[0] <= n_max:
        raise ValueError(f"user sequence has {arr.shape[0] - 1} terms, need {n_max}")
    return np.mod(arr[: n_max + 1], 1.0)


def _column_points(table: np.ndarray, xlo: float, xhi: float, ylo: float, yhi: float, sign: float):
    """Points ``(k, sign * a_|k| + l)`` with ``k != 0`` inside the rectangle."""
    k = np.arange(math.ceil(xlo - 1e-9), math.floor(xhi + 1e-9) + 1, dtype=np.int64)
    k = k[k != 0]
    off = sign * table[np.abs(k)]
    m0 = np.ceil(ylo - 1e-9 - off).astype(np.int64)
    m1 = np.floor(yhi + 1e-9 - off).astype(np.int64)
    cnt = np.maximum(m1 - m0 + 1, 0)
    idx = np.repeat(np.arange(k.size), cnt)
    first = np.repeat(np.cumsum(cnt) - cnt, cnt)
    m = m0[idx] + (np.arange(idx.size) - first)
    return k[idx].astype(np.float64), off[idx] + m


def peres_points(spec: PeresSpec) -> np.ndarray:
    """``(F1 u F2) n window``, each point once, F1 points first then lexicographic."""
    w = spec.window
    x0, y0 = w.lo
    x1, y1 = w.hi
    n_max = max(1, math.floor(w.reach) + 1)
    ncols = 2 * n_max + 1
    estimate = ncols * (math.floor(y1 - y0) + 1) + ncols * (math.floor(x1 - x0) + 1)
    if estimate > spec.budget:
        raise BudgetExceeded(f"peres-forest: window needs about {estimate} points, budget is {spec.budget}")
    table = spec.table(n_max)
    kx, ky = _column_points(table, x0, x1, y0, y1, 1.0)
    f1 = np.column_stack([kx, ky])
    # rows y = k carry x in -a_|k| + Z
    ry, rx = _column_points(table, y0, y1, x0, x1, -1.0)
    f2 = np.column_stack([rx, ry])
    pts = np.concatenate([f1, f2])
    rank = np.concatenate([np.zeros(len(f1), np.int64), np.ones(len(f2), np.int64)])
    return dedup_points(pts, rank)


@dataclass(frozen=True, eq=False)
class PeresForest:
    """Distance oracle for the full (infinite) forest, backed by a value table."""

    sequence_kind: str
    table: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, kind: str, reach: float, sequence=None) -> "PeresForest":
        n_max = math.floor(reach) + 2
        return cls(kind, sequence_table(kind, n_max, sequence))

    @property
    def dim(self) -> int:
        return 2

    @property
    def reach(self) -> float:
        return float(self.table.shape[0] - 2)

    def covering_radius(self) -> float:
        # every point is within 1/2 of a column or row and 1/2 of a lattice point on it
        return 2.0

    def segment_distances(self, A, B, r0: float, stop: float = -1.0, backend=None) -> np.ndarray:
        return kernels.min_dist_peres(A, B, self.table, r0, self.covering_radius(), stop=stop, backend=backend)
