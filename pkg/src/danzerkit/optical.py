"""Optical forest and the epsilon-nets obtained by rescaling its finite patches."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AxisBox
from .lattice import DEFAULT_BUDGET, NONZERO, ForestSpec, enumerate_points


def optical_forest_spec(d: int) -> ForestSpec:
    """Layers with coarse spacing ``2^((d-1)j)`` and fine spacing ``1/(sqrt(d-1) 2^(j+1))``."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    root = math.sqrt(d - 1)

    def params(j: int):
        return 2.0 ** (-(d - 1) * j), float(2 ** ((d - 1) * j)), 1.0 / (root * 2 ** (j + 1))

    return ForestSpec(dim=d, coarse_index_set=NONZERO, params=params, name=f"optical(d={d})")


def optical_forest_points(d: int, window: AxisBox, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    return enumerate_points(optical_forest_spec(d), window, budget)


@dataclass(frozen=True)
class NetSpec:
    dim: int
    n: int

    def __post_init__(self):
        if self.dim < 2 or self.n < 1:
            raise ValueError("need d >= 2 and n >= 1")

    @property
    def epsilon(self) -> float:
        return 2.0 ** (-(self.dim - 1) * self.dim * self.n)

    @property
    def tau(self) -> float:
        # d^(1/(2d)) keeps tau^d = 2^d sqrt(d) / epsilon
        d = self.dim
        return 2.0 * d ** (1.0 / (2 * d)) * 2.0 ** ((d - 1) * self.n)

    @classmethod
    def for_epsilon(cls, d: int, eps: float) -> "NetSpec":
        """Smallest ``n`` whose grid value ``2^-((d-1)dn)`` does not exceed ``eps``."""
        if not 0 < eps:
            raise ValueError("epsilon must be positive")
        n = max(1, math.ceil(-math.log2(eps) / ((d - 1) * d) - 1e-12))
        while 2.0 ** (-(d - 1) * d * n) > eps:
            n += 1
        return cls(d, n)


@dataclass(frozen=True, eq=False)
class EpsilonNet:
    spec: NetSpec
    points: np.ndarray

    @property
    def cardinality(self) -> int:
        return int(self.points.shape[0])

    @property
    def bound_ratio(self) -> float:
        """``#N / (eps^-1 ln eps^-1)``."""
        inv = 1.0 / self.spec.epsilon
        return self.cardinality / (inv * math.log(inv))

    def report(self) -> dict:
        return {
            "d": self.spec.dim,
            "n": self.spec.n,
            "epsilon": self.spec.epsilon,
            "tau": self.spec.tau,
            "cardinality": self.cardinality,
            "bound_ratio": self.bound_ratio,
        }


def epsilon_net(d: int, n: int, budget: int = DEFAULT_BUDGET) -> EpsilonNet:
    """The patch ``Q_n`` of the optical forest in ``[0, tau]^d``, mapped affinely onto ``[-1/2, 1/2]^d``."""
    spec = NetSpec(d, n)
    tau = spec.tau
    patch = optical_forest_points(d, AxisBox.cube(d, 0.0, tau), budget)
    pts = np.clip(patch / tau - 0.5, -0.5, 0.5)
    return EpsilonNet(spec, pts)


def long_box(d: int, eps: float, corner, long_axis: int = 0) -> AxisBox:
    """Box with sides ``2^d sqrt(d)/eps^(d-1)`` along ``long_axis`` and ``eps`` elsewhere (volume ``2^d sqrt(d)``)."""
    sides = np.full(d, float(eps))
    sides[long_axis] = 2**d * math.sqrt(d) / eps ** (d - 1)
    lo = np.asarray(corner, dtype=np.float64)
    return AxisBox(lo, lo + sides)
