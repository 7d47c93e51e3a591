"""Dense forests built as unions of axis-swapped, translated lattices.

A forest is an infinite union of layers.  Layer ``j`` is the lattice

    S_j = {(k * coarse_j, l_2 * fine_j, ..., l_d * fine_j)}

with ``k`` ranging over the nonzero (or the odd) integers, replicated under the
``d`` coordinate swaps that exchange axis 1 with axis ``i``.  Layers are
generated lazily; only layers that can meet a finite window are touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .geometry import TOL, AxisBox
from . import kernels

NONZERO = "nonzero-integers"
ODD = "odd-integers"

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An enumeration would emit more points than the configured budget."""


@dataclass(frozen=True)
class LatticeLayer:
    j: int
    coarse_spacing: float
    fine_spacing: float
    coarse_index_set: str
    swap_axis: int
    epsilon: float
    dim: int

    def __post_init__(self):
        if not self.coarse_spacing > self.fine_spacing > 0:
            raise ValueError(f"layer {self.j}: need coarse > fine > 0, got {self.coarse_spacing}, {self.fine_spacing}")
        if not 1 <= self.swap_axis <= self.dim:
            raise ValueError(f"swap axis {self.swap_axis} outside 1..{self.dim}")
        if self.coarse_index_set not in (NONZERO, ODD):
            raise ValueError(f"unknown index set {self.coarse_index_set!r}")

    @property
    def coarse_axis(self) -> int:
        """0-based axis carrying the coarse coordinate after the swap."""
        return self.swap_axis - 1

    def coarse_indices(self, lo: float, hi: float) -> np.ndarray:
        """Admissible ``k`` with ``k * coarse`` in ``[lo, hi]`` (closed, with tolerance)."""
        c = self.coarse_spacing
        k0 = math.ceil((lo - TOL) / c)
        k1 = math.floor((hi + TOL) / c)
        if k1 < k0:
            return np.empty(0, dtype=np.int64)
        k = np.arange(k0, k1 + 1, dtype=np.int64)
        if self.coarse_index_set == ODD:
            return k[k % 2 != 0]
        return k[k != 0]

    def fine_indices(self, lo: float, hi: float) -> np.ndarray:
        h = self.fine_spacing
        return np.arange(math.ceil((lo - TOL) / h), math.floor((hi + TOL) / h) + 1, dtype=np.int64)


def odd_ceiling(x: float) -> int:
    """Smallest odd integer strictly larger than ``x``."""
    n = math.floor(x) + 1
    return n if n % 2 else n + 1


@dataclass(frozen=True)
class ForestSpec:
    """An immutable, lazily evaluated union of lattice layers.

    ``params(j)`` returns ``(epsilon_j, coarse_j, fine_j)`` for ``j >= 1``; the
    coarse spacings must increase strictly.  ``n_layers`` bounds the schedule
    when only a finite prefix is known (``None`` means unbounded).
    """

    dim: int
    coarse_index_set: str
    params: Callable[[int], tuple[float, float, float]] = field(repr=False)
    name: str = "forest"
    n_layers: int | None = None
    tail_bound: Callable[[int], float] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")

    def layer(self, j: int, swap_axis: int = 1) -> LatticeLayer:
        if j < 1 or (self.n_layers is not None and j > self.n_layers):
            raise IndexError(f"layer {j} outside the stored schedule of {self.name}")
        eps, coarse, fine = self.params(j)
        return LatticeLayer(j, coarse, fine, self.coarse_index_set, swap_axis, eps, self.dim)

    def layers(self, j: int) -> list[LatticeLayer]:
        """The ``d`` swapped copies of layer ``j``."""
        return [self.layer(j, i) for i in range(1, self.dim + 1)]

    def visibility_schedule(self, j: int) -> tuple[float, float]:
        """``(e_j, V(e_j))``; the coarse spacing plays the role of V(e_j)."""
        eps, coarse, _ = self.params(j)
        return eps, coarse

    def layers_within(self, reach: float) -> Iterator[int]:
        """Layer indices whose coarse spacing does not exceed ``reach``."""
        j = 1
        while True:
            if self.n_layers is not None and j > self.n_layers:
                last = self.params(self.n_layers)[1]
                if last <= reach:
                    raise ValueError(
                        f"{self.name}: stored schedule ends at layer {self.n_layers} "
                        f"(coarse {last}) but the window reaches {reach}"
                    )
                return
            if self.params(j)[1] > reach + TOL:
                return
            yield j
            j += 1

    def layer_index_for(self, eps: float) -> int:
        """The unique ``i`` with ``e_i <= eps < e_{i-1}`` (``e_0 = +inf``)."""
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        j = 1
        while self.params(j)[0] > eps:
            j += 1
            if self.n_layers is not None and j > self.n_layers:
                raise ValueError(f"epsilon {eps} below the stored schedule")
        return j

    def visibility(self, eps: float) -> float:
        """Step visibility function W(eps) = V(e_i) with ``e_i <= eps < e_{i-1}``."""
        return self.params(self.layer_index_for(eps))[1]

    def hitting_length(self, j: int) -> float:
        """Segments of this length are within ``e_j`` of layer ``j`` (``2 sqrt(d) V(e_j)``)."""
        return 2.0 * math.sqrt(self.dim) * self.params(j)[1]

    def covering_radius(self) -> float:
        """Upper bound on the distance from any point of R^d to the forest."""
        _, c, h = self.params(1)
        step = 2 * c if self.coarse_index_set == ODD else c
        return step + c + math.sqrt(self.dim) * h

    # -- finite views -------------------------------------------------------

    def fibers(self, box: AxisBox):
        """Packed fiber arrays for every layer hyperplane meeting ``box``."""
        axis, coords, spacing = [], [], []
        for j in self.layers_within(box.reach):
            for lay in self.layers(j):
                a = lay.coarse_axis
                k = lay.coarse_indices(box.lo[a], box.hi[a])
                axis.append(np.full(k.size, a))
                coords.append(k * lay.coarse_spacing)
                spacing.append(np.full(k.size, lay.fine_spacing))
        if not axis:
            return kernels.pack_fibers(self.dim, [], [], [], [])
        return kernels.pack_fibers(
            self.dim, np.concatenate(axis), np.concatenate(coords), np.concatenate(spacing), 0.0
        )


def _corollary_params(d: int, eta: float):
    def params(j: int):
        mult = odd_ceiling(j * math.log(j) ** (1.0 + eta))
        return 2.0 ** -j, float(mult * 2 ** (j * (d - 1))), 2.0 ** -j

    return params


def corollary_forest_spec(d: int, eta: float) -> ForestSpec:
    """Explicit forest with ``e_j = 2^-j`` and odd-ceiling coarse spacings.

    Layer ``j``: coarse spacing ``odd_ceiling(j ln(j)^(1+eta)) * 2^(j(d-1))`` on
    odd multiples, fine spacing ``2^-j``.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not eta > 0:
        raise ValueError("eta must be positive")

    def tail(J: int) -> float:
        # sum_{j>J} 1/odd_ceil(j ln j^(1+eta)) <= int_J^inf dx / (x ln(x)^(1+eta))
        if J < 2:
            return math.inf
        return 1.0 / (eta * math.log(J) ** eta)

    return ForestSpec(
        dim=d,
        coarse_index_set=ODD,
        params=_corollary_params(d, eta),
        name=f"corollary(d={d}, eta={eta:g})",
        tail_bound=tail,
    )


def schedule_forest_spec(d: int, epsilons, visibilities, tail_bound: float) -> ForestSpec:
    """Generic forest from a finite visibility schedule ``(e_j, V(e_j))``.

    Layer ``j`` has coarse spacing ``V(e_j)`` over the nonzero integers and
    fine spacing ``e_j / sqrt(d)``.  The caller certifies the tail
    ``sum_{j > J} e_j^-(d-1) / V(e_j) <= tail_bound`` of the convergent series.
    """
    e = [float(x) for x in epsilons]
    v = [float(x) for x in visibilities]
    if len(e) != len(v) or not e:
        raise ValueError("need matching, nonempty epsilon and visibility lists")
    if any(a <= b for a, b in zip(e, e[1:])) or not all(0 < x < 1 for x in e):
        raise ValueError("epsilons must lie in (0, 1) and decrease strictly")
    if any(a >= b for a, b in zip(v, v[1:])):
        raise ValueError("visibilities must increase strictly")
    if not (tail_bound >= 0 and math.isfinite(tail_bound)):
        raise ValueError("a finite tail bound certificate is required")
    sd = math.sqrt(d)

    def params(j: int):
        return e[j - 1], v[j - 1], e[j - 1] / sd

    return ForestSpec(
        dim=d,
        coarse_index_set=NONZERO,
        params=params,
        name=f"schedule(d={d}, {len(e)} layers)",
        n_layers=len(e),
        tail_bound=lambda J: tail_bound,
    )


def series_terms(spec: ForestSpec, j_max: int) -> np.ndarray:
    d = spec.dim
    out = []
    for j in range(1, j_max + 1):
        e, v = spec.visibility_schedule(j)
        out.append(e ** -(d - 1) / v)
    return np.array(out)


def series_density_bound(spec: ForestSpec, j_max: int) -> float:
    """``2^d d^(d/2) sum_{j<=j_max} e_j^-(d-1) / V(e_j)``."""
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    d = spec.dim
    return float(2**d * d ** (d / 2) * math.fsum(series_terms(spec, j_max)))


def series_total_bound(spec: ForestSpec, j_max: int) -> float:
    """Partial sum up to ``j_max`` plus the certified tail: bounds the full series."""
    if spec.tail_bound is None:
        return math.inf
    d = spec.dim
    return float(2**d * d ** (d / 2) * (math.fsum(series_terms(spec, j_max)) + spec.tail_bound(j_max)))


def layer_for_radius(spec: ForestSpec, T: float) -> int:
    """Largest ``j`` with ``V(e_j) <= T`` (0 if none)."""
    j = 0
    for j in spec.layers_within(T):
        pass
    return j


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def enumerate_layer(layer: LatticeLayer, box: AxisBox, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Points of one swapped layer inside the closed box, lexicographic order."""
    d = layer.dim
    if box.dim != d:
        raise ValueError(f"window dimension {box.dim} != layer dimension {d}")
    a = layer.coarse_axis
    k = layer.coarse_indices(box.lo[a], box.hi[a])
    axes = [k * layer.coarse_spacing if q == a else layer.fine_indices(box.lo[q], box.hi[q]) * layer.fine_spacing
            for q in range(d)]
    total = math.prod(len(x) for x in axes)
    if total > budget:
        raise BudgetExceeded(
            f"lattice-forests: layer j={layer.j} (swap axis {layer.swap_axis}) needs {total} points, budget is {budget}"
        )
    if total == 0:
        return np.empty((0, d))
    grids = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def _lex_cols(keys: np.ndarray) -> list:
    # np.lexsort treats the last key as primary
    return [keys[:, q] for q in range(keys.shape[1] - 1, -1, -1)]


def dedup_points(points: np.ndarray, rank: np.ndarray | None = None) -> np.ndarray:
    """Remove duplicate points; order by ``rank`` (first occurrence wins) then lexicographically.

    Points are compared after rounding to the global tolerance grid, which is
    exact for the dyadic coordinates of the explicit constructions.
    """
    if points.shape[0] == 0:
        return points
    if rank is None:
        rank = np.zeros(points.shape[0], dtype=np.int64)
    keys = np.round(points / TOL).astype(np.int64)
    order = np.lexsort([rank] + _lex_cols(keys))
    ks = keys[order]
    first = np.ones(ks.shape[0], dtype=bool)
    first[1:] = np.any(ks[1:] != ks[:-1], axis=1)
    keep = order[first]
    final = np.lexsort(_lex_cols(keys[keep]) + [rank[keep]])
    return points[keep[final]]


def enumerate_points(spec: ForestSpec, window: AxisBox, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All forest points in the closed window, each once.

    Order is layer-major (a point belongs to the first layer containing it),
    then lexicographic.  Raises :class:`BudgetExceeded` naming the layer at
    which the running total passes ``budget``.
    """
    if window.dim != spec.dim:
        raise ValueError(f"window dimension {window.dim} != forest dimension {spec.dim}")
    chunks, ranks = [], []
    total = 0
    for j in spec.layers_within(window.reach):
        for lay in spec.layers(j):
            pts = enumerate_layer(lay, window, budget - total)
            total += pts.shape[0]
            chunks.append(pts)
            ranks.append(np.full(pts.shape[0], j, dtype=np.int64))
    if not chunks:
        return np.empty((0, spec.dim))
    return dedup_points(np.concatenate(chunks), np.concatenate(ranks))


def count_in_ball(spec: ForestSpec, T: float, budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of forest points with Euclidean norm at most ``T``."""
    if not T > 0:
        raise ValueError("radius must be positive")
    pts = enumerate_points(spec, AxisBox.cube(spec.dim, -T, T), budget)
    if pts.shape[0] == 0:
        return 0
    return int(np.count_nonzero(np.einsum("ij,ij->i", pts, pts) <= T * T * (1 + 1e-12)))


def layer_ball_count(layer: LatticeLayer, T: float) -> int:
    """Closed-form count of one swapped layer inside the ball of radius ``T``.

    Independent of :func:`enumerate_layer`: sums, over admissible coarse
    hyperplanes, the number of fine-lattice points in the cross-section ball.
    """
    h = layer.fine_spacing

    def lattice_in_ball(rho2: float, dims: int) -> int:
        # points of h*Z^dims with squared norm <= rho2
        if rho2 < 0:
            return 0
        if dims == 1:
            return 2 * math.floor(math.sqrt(rho2) / h + 1e-9) + 1
        m = math.floor(math.sqrt(rho2) / h + 1e-9)
        return sum(lattice_in_ball(rho2 - (q * h) ** 2, dims - 1) for q in range(-m, m + 1))

    kmax = math.floor(T / layer.coarse_spacing + 1e-9)
    total = 0
    for k in range(-kmax, kmax + 1):
        if k == 0 or (layer.coarse_index_set == ODD and k % 2 == 0):
            continue
        total += lattice_in_ball(T * T - (k * layer.coarse_spacing) ** 2, layer.dim - 1)
    return total


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def format_points_csv(points: np.ndarray, dim: int) -> str:
    lines = [f"# dim={dim}"]
    lines.extend(",".join(f"{v:.12g}" for v in row) for row in np.asarray(points))
    return "\n".join(lines) + "\n"


def write_points_csv(path, points: np.ndarray, dim: int) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_points_csv(points, dim))


def read_points_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# dim="):
            raise ValueError(f"missing '# dim=' header in {path}")
        dim = int(header.split("=", 1)[1])
        rows = [list(map(float, line.split(","))) for line in fh if line.strip()]
    pts = np.array(rows, dtype=np.float64).reshape(-1, dim)
    return pts
