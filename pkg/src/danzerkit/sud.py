"""Exact dyadic digital sequence, its block structure, and dispersion measurements.

Index bookkeeping:

* every ``n >= 1`` is written uniquely as ``n = k 2^i + 2^(i-1) - 2``
  (``i - 1`` is the 2-adic valuation of ``n + 2``);
* for ``u = i^2``, ``k`` is reduced as ``k = r 2^u + s (mod 2 * 2^(2u))`` with
  ``0 <= r < 2 * 2^u`` and ``1 <= s <= 2^u``;
* the term is ``r s / 2^u`` when ``r < 2^u`` and ``(r s + s) / 2^u`` otherwise.

All values are dyadic rationals and are handled with Python integers, so no
rounding ever enters a pass/fail decision.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels

#: Largest ``i`` served by the int64 vectorised path (``u = 25`` keeps ``r*s < 2^51``).
INT64_MAX_I = 5
#: Largest ``i`` for which a block is materialised in full (``V_3 = 2^19`` terms).
MATERIALIZE_MAX_I = 3


@dataclass(frozen=True, eq=False)
class DyadicRational:
    """The torus point ``numerator / 2^log2_denominator`` reduced into ``[0, 1)``."""

    numerator: int
    log2_denominator: int

    def __post_init__(self):
        q = int(self.log2_denominator)
        if q < 0:
            raise ValueError("log2_denominator must be non-negative")
        object.__setattr__(self, "log2_denominator", q)
        object.__setattr__(self, "numerator", int(self.numerator) % (1 << q))

    @classmethod
    def from_fraction(cls, f) -> "DyadicRational":
        f = Fraction(f)
        den = f.denominator
        if den & (den - 1):
            raise ValueError(f"{f} is not dyadic")
        return cls(f.numerator, den.bit_length() - 1)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.log2_denominator)

    def reduced(self) -> "DyadicRational":
        p, q = self.numerator, self.log2_denominator
        while q and not p & 1:
            p >>= 1
            q -= 1
        return DyadicRational(p, q)

    def __float__(self):
        return self.numerator / float(1 << self.log2_denominator) if self.log2_denominator < 1000 else float(self.as_fraction())

    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return self.as_fraction() == other.as_fraction()
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.as_fraction())

    def _coerce(self, other):
        if isinstance(other, DyadicRational):
            return other
        if isinstance(other, (int, Fraction)):
            return DyadicRational.from_fraction(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        q = max(self.log2_denominator, o.log2_denominator)
        return DyadicRational(
            (self.numerator << (q - self.log2_denominator)) + (o.numerator << (q - o.log2_denominator)), q
        )

    __radd__ = __add__

    def __neg__(self):
        return DyadicRational(-self.numerator, self.log2_denominator)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return DyadicRational(self.numerator * k, self.log2_denominator)

    __rmul__ = __mul__

    def __repr__(self):
        return f"DyadicRational({self.numerator}, {self.log2_denominator})"


# ---------------------------------------------------------------------------
# index decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexDecomposition:
    i: int
    k: int

    @property
    def n(self) -> int:
        return self.k * 2**self.i + 2 ** (self.i - 1) - 2


@dataclass(frozen=True)
class BlockDecomposition:
    r: int
    s: int
    i: int

    @property
    def u(self) -> int:
        return self.i * self.i

    def residue(self) -> int:
        """``r 2^u + s`` as an element of ``[1, 2 * 2^(2u)]``."""
        return self.r * 2**self.u + self.s


def decompose_index(n: int) -> IndexDecomposition:
    if n < 1:
        raise ValueError("n must be a positive integer")
    m = n + 2
    i = (m & -m).bit_length()  # valuation + 1
    k = (m - 2 ** (i - 1)) >> i
    return IndexDecomposition(i, k)


def block_decompose(k: int, i: int) -> BlockDecomposition:
    """Unique ``(r, s)`` with ``k = r 2^u + s (mod 2 * 2^(2u))`` and ``1 <= s <= 2^u``."""
    if i < 1 or k < 0:
        raise ValueError("need i >= 1 and k >= 0")
    U = 2 ** (i * i)
    s = (k - 1) % U + 1
    r = ((k - s) // U) % (2 * U)
    return BlockDecomposition(r, s, i)


def _term_numerator(r: int, s: int, U: int) -> int:
    return (r * s + (s if r >= U else 0)) % U


def u_value(n: int, max_i: int | None = None) -> DyadicRational:
    """The ``n``-th term, exactly.

    Python integers carry any ``i``; ``max_i`` optionally caps the scale and
    raises :class:`OverflowError` beyond it.
    """
    dec = decompose_index(n)
    if max_i is not None and dec.i > max_i:
        raise OverflowError(f"u_{n} needs scale i={dec.i} > configured maximum {max_i}")
    bd = block_decompose(dec.k, dec.i)
    u = dec.i * dec.i
    return DyadicRational(_term_numerator(bd.r, bd.s, 2**u), u)


def u_numerators(ns, max_i: int = INT64_MAX_I) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised int64 path: ``(numerators, log2_denominators)`` for an array of indices.

    Raises :class:`OverflowError` if any index needs a scale above ``max_i``
    (at most :data:`INT64_MAX_I`, where the products stop fitting in int64).
    """
    if max_i > INT64_MAX_I:
        raise OverflowError(f"int64 path supports i <= {INT64_MAX_I}")
    ns = np.asarray(ns, dtype=np.int64)
    if np.any(ns < 1):
        raise ValueError("indices must be positive")
    m = ns + 2
    low = m & -m
    i = np.zeros_like(ns)
    for t in range(1, max_i + 1):
        i[low == (1 << (t - 1))] = t
    if np.any(i == 0):
        bad = int(ns[i == 0][0])
        raise OverflowError(f"u_{bad} needs scale i > {max_i}")
    k = (m - low) >> i
    u = i * i
    U = np.left_shift(np.int64(1), u)
    s = (k - 1) % U + 1
    r = ((k - s) // U) % (2 * U)
    num = (r * s + np.where(r >= U, s, 0)) % U
    return num, u


def u_floats(n_max: int) -> np.ndarray:
    """Float table ``t`` with ``t[n] = u_n`` for ``1 <= n <= n_max`` (``t[0]`` unused)."""
    out = np.zeros(n_max + 1)
    if n_max < 1:
        return out
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    m = ns + 2
    small = (m & -m) <= (1 << (INT64_MAX_I - 1))
    num, u = u_numerators(ns[small])
    out[ns[small]] = num / np.exp2(u)
    for n in ns[~small].tolist():
        out[n] = float(u_value(n))
    return out


# ---------------------------------------------------------------------------
# blocks and the interleaved sequence
# ---------------------------------------------------------------------------


def block_length(i: int) -> int:
    """``V_i = 2 * 2^(2 i^2)`` (``V_0 = 2``)."""
    return 2 * 2 ** (2 * i * i)


@dataclass(frozen=True)
class SudBlock:
    """The finite block ``(c_k)_{k in [1, V_i]}`` with denominator ``2^u``, ``u = i^2``."""

    i: int

    @property
    def u(self) -> int:
        return self.i * self.i

    @property
    def length(self) -> int:
        return block_length(self.i)

    def value(self, k: int) -> DyadicRational:
        if not 1 <= k <= self.length:
            raise IndexError(f"block index {k} outside [1, {self.length}]")
        U = 2**self.u
        r, s = divmod(k - 1, U)
        return DyadicRational(_term_numerator(r, s + 1, U), self.u)

    def numerators(self) -> np.ndarray:
        """All numerators over ``2^u`` as int64 (materialised, ``i <= 3``)."""
        if self.i > MATERIALIZE_MAX_I:
            raise ValueError(f"block i={self.i} has {self.length} terms; only i <= {MATERIALIZE_MAX_I} is materialised")
        return _block_numerators(self.i).copy()

    def __getitem__(self, k: int) -> DyadicRational:
        return self.value(k)

    def __len__(self) -> int:
        return self.length


@functools.lru_cache(maxsize=None)
def _block_numerators(i: int) -> np.ndarray:
    u = i * i
    U = 1 << u
    k = np.arange(1, block_length(i) + 1, dtype=np.int64)
    r = (k - 1) >> u
    s = ((k - 1) & (U - 1)) + 1
    num = (r * s + np.where(r >= U, s, 0)) & (U - 1)
    num.flags.writeable = False
    return num


def block_values(i: int) -> SudBlock:
    if i < 1:
        raise ValueError("i must be positive")
    if i > INT64_MAX_I:
        raise OverflowError(f"block scale i={i} exceeds the exact int64 range (i <= {INT64_MAX_I})")
    return SudBlock(i)


def interleave(n: int, max_i: int | None = None) -> DyadicRational:
    """``b_n = c^(i)_k`` with ``(i, k)`` from the index decomposition; blocks repeat with period ``V_i``."""
    dec = decompose_index(n)
    if max_i is not None and dec.i > max_i:
        raise OverflowError(f"b_{n} needs scale i={dec.i} > configured maximum {max_i}")
    V = block_length(dec.i)
    idx = (dec.k - 1) % V + 1
    if dec.i <= MATERIALIZE_MAX_I:
        return DyadicRational(int(_block_numerators(dec.i)[idx - 1]), dec.i * dec.i)
    return SudBlock(dec.i).value(idx)


def scale_index(eps: float) -> int:
    """Unique ``i >= 1`` with ``2^-(i^2) <= eps < 2^-((i-1)^2)``."""
    if not 0 < eps < 1 and eps != 1:
        raise ValueError("epsilon must lie in (0, 1]")
    i = 1
    while 2.0 ** -(i * i) > eps:
        i += 1
    return i


def base_visibility(eps: float) -> float:
    """``V(eps) = 2 eps^-2``; ``V_i = V(2^-(i^2))`` is the block length."""
    return 2.0 / (eps * eps)


def window_visibility(eps: float) -> float:
    """``2^(i+2) (V_i / V_(i-1)) V(eps)`` with ``i`` the scale index of ``eps``."""
    i = scale_index(eps)
    return 2.0 ** (i + 2) * (block_length(i) / block_length(i - 1)) * base_visibility(eps)


def peres_visibility(eps: float) -> float:
    """``4 * 2^i (V_(i+1) / V_i) V(eps)`` with ``i`` the scale index of ``eps``."""
    i = scale_index(eps)
    return 4.0 * 2.0**i * (block_length(i + 1) / block_length(i)) * base_visibility(eps)


# ---------------------------------------------------------------------------
# dispersion
# ---------------------------------------------------------------------------


def _is_exact(x) -> bool:
    return isinstance(x, (DyadicRational, Fraction, int)) and not isinstance(x, bool)


def _as_fraction(x) -> Fraction:
    return x.as_fraction() if isinstance(x, DyadicRational) else Fraction(x)


def max_gap_residues(nums, modulus: int) -> int:
    """Largest circular gap of integer residues modulo ``modulus``."""
    if modulus < 2**62:
        v = np.sort(np.asarray(nums, dtype=np.int64) % modulus)
        wrap = int(v[0]) + modulus - int(v[-1])
        return max(wrap, int(np.diff(v).max())) if v.size > 1 else wrap
    v = sorted(int(x) % modulus for x in nums)
    g = v[0] + modulus - v[-1]
    for a, b in zip(v, v[1:]):
        g = max(g, b - a)
    return g


def exact_dispersion(points: Iterable) -> Fraction | float:
    """``sup_x min_i ||x - a_i||``: half the largest circular gap.

    Exact (a :class:`~fractions.Fraction`) when every input is a
    :class:`DyadicRational`, ``Fraction`` or ``int``; a float otherwise.
    """
    pts = list(points)
    if not pts:
        raise ValueError("dispersion of an empty set is undefined")
    if all(_is_exact(p) for p in pts):
        fr = [_as_fraction(p) % 1 for p in pts]
        D = functools.reduce(math.lcm, (f.denominator for f in fr), 1)
        nums = [f.numerator * (D // f.denominator) for f in fr]
        return Fraction(max_gap_residues(nums, D), 2 * D)
    v = np.sort(np.mod(np.asarray([float(p) for p in pts], dtype=np.float64), 1.0))
    wrap = v[0] + 1.0 - v[-1]
    g = max(wrap, float(np.diff(v).max())) if v.size > 1 else wrap
    return g / 2.0


@dataclass(frozen=True)
class DispersionQuery:
    N: int
    m: int = 0
    xi: object = 0

    def __post_init__(self):
        if self.N < 1 or self.m < 0:
            raise ValueError("need N >= 1 and m >= 0")


def _term(seq, n: int):
    if callable(seq):
        return seq(n)
    return seq[n - 1]


def perturbed_dispersion(seq: Callable[[int], object] | Sequence, q: DispersionQuery):
    """Dispersion of ``{a_(i+m) - i xi : 1 <= i <= N}``.

    ``seq`` is either a callable ``n -> a_n`` (``n >= 1``) or a sequence whose
    element ``[n - 1]`` is ``a_n``.
    """
    xi = q.xi
    if _is_exact(xi):
        xi_f = _as_fraction(xi)
        terms = [_term(seq, i + q.m) for i in range(1, q.N + 1)]
        if all(_is_exact(t) for t in terms):
            return exact_dispersion([_as_fraction(t) - i * xi_f for i, t in enumerate(terms, start=1)])
        xi = float(xi_f)
    return exact_dispersion([float(_term(seq, i + q.m)) - i * float(xi) for i in range(1, q.N + 1)])


@dataclass(frozen=True)
class SudLowerBound:
    value: Fraction | float
    m: int
    xi: object


def sud_lower_bound(seq, N: int, m_values: Iterable[int], xi_values: Iterable) -> SudLowerBound:
    """``max`` of the perturbed dispersion over finite sets of shifts and slopes.

    Only a lower bound on the super-uniform dispersion: the true quantity takes
    a supremum over all shifts ``m`` and all ``xi`` on the circle.
    """
    best = None
    xis = list(xi_values)
    for m in m_values:
        for xi in xis:
            v = perturbed_dispersion(seq, DispersionQuery(N, m, xi))
            if best is None or v > best.value:
                best = SudLowerBound(v, m, xi)
    if best is None:
        raise ValueError("need at least one shift and one slope")
    return best


# ---------------------------------------------------------------------------
# block verification
# ---------------------------------------------------------------------------


class InfeasibleError(ValueError):
    """The requested exhaustive check is outside desk scale."""


@dataclass(frozen=True)
class BlockReport:
    i: int
    u: int
    grid_points: int
    max_window_defect: Fraction
    window_target: Fraction
    worst_xi: Fraction
    claimed_bound: Fraction
    passed: bool
    full_block_grid_defect: Fraction | None = None

    @property
    def certified_bound(self) -> Fraction | None:
        """``2^-u`` when every grid window check holds, else ``None``."""
        return self.claimed_bound if self.passed else None

    def as_dict(self) -> dict:
        cb = self.certified_bound
        return {
            "i": self.i,
            "u": self.u,
            "grid_points": self.grid_points,
            "max_window_defect": float(self.max_window_defect),
            "max_window_defect_exact": str(self.max_window_defect),
            "window_target": float(self.window_target),
            "worst_xi": str(self.worst_xi),
            "claimed_bound": float(self.claimed_bound),
            "certified_bound": None if cb is None else float(cb),
            "full_block_grid_defect": None if self.full_block_grid_defect is None else float(self.full_block_grid_defect),
            "pass": self.passed,
        }


def _block_over(i: int, numerators, log2_den: int | None, q: int) -> np.ndarray:
    """Block numerators rescaled to denominator ``2^q``."""
    u = i * i
    if numerators is None:
        nums, den = _block_numerators(i), u
    else:
        nums = np.asarray(numerators, dtype=np.int64)
        den = u if log2_den is None else int(log2_den)
        if nums.shape != (block_length(i),):
            raise ValueError(f"block i={i} needs {block_length(i)} values, got {nums.shape}")
    if den > q:
        raise ValueError(f"block denominator 2^{den} is finer than 2^{q}")
    return (nums << (q - den)) % (1 << q)


def block_sud_verify(i: int, numerators=None, log2_den: int | None = None,
                     full_block: bool | None = None, backend=None) -> BlockReport:
    """Exhaustive grid check of the block bound, following the windowed argument.

    For every ``xi = l/2^u + l'/2^(2u)`` (``0 <= l < 2^u``, ``1 <= l' <= 2^u``)
    the window ``k' = m0 2^u + j``, ``j in [1, 2^u]``, with ``m0 = l' - 1`` for
    odd ``l`` and ``m0 = 2^u + l' - 1`` for even ``l``, must satisfy

        sup_gamma min_j ||c_k' - k' xi - gamma|| <= 2^-(u+1),

    computed exactly as half the largest circular gap.  If every window passes,
    the triangle-inequality step extends the bound to ``2^-u`` for all ``xi``.

    ``numerators``/``log2_den`` substitute a different block (mutation tests);
    by default the block of the digital sequence is checked.  ``full_block``
    additionally reports the grid defect of the whole block (default: ``i <= 2``).
    """
    if i < 1:
        raise ValueError("i must be positive")
    if i > MATERIALIZE_MAX_I:
        raise InfeasibleError(f"exhaustive block check is limited to i <= {MATERIALIZE_MAX_I}")
    u = i * i
    U = 1 << u
    M = U * U
    cnum = _block_over(i, numerators, log2_den, 2 * u)
    l = np.repeat(np.arange(U, dtype=np.int64), U)
    lp = np.tile(np.arange(1, U + 1, dtype=np.int64), U)
    xis = l * U + lp
    m0 = np.where(l % 2 == 1, lp - 1, U + lp - 1)
    starts = m0 * U + 1
    gaps = kernels.window_max_gaps(cnum, M, starts, xis, U, backend=backend)
    w = int(np.argmax(gaps))
    worst = int(gaps[w])
    full = None
    if full_block is None:
        full_block = i <= 2
    if full_block:
        V = block_length(i)
        fg = kernels.window_max_gaps(cnum, M, np.ones_like(xis), xis, V, backend=backend)
        full = Fraction(int(fg.max()), 2 * M)
    return BlockReport(
        i=i,
        u=u,
        grid_points=int(xis.size),
        max_window_defect=Fraction(worst, 2 * M),
        window_target=Fraction(1, 2 * U),
        worst_xi=Fraction(int(xis[w]) % M, M),
        claimed_bound=Fraction(1, U),
        passed=worst <= U,
        full_block_grid_defect=full,
    )


def block_exact_sup(i: int, numerators=None, log2_den: int | None = None, backend=None) -> tuple[Fraction, Fraction]:
    """Exact ``sup_xi`` of the block's perturbed dispersion over the whole circle.

    Independent of the grid argument: scans every slope at which two
    perturbed terms collide (see :func:`danzerkit.kernels.breakpoint_sup`).
    Cost grows like ``2^u V_i^3``; limited to ``i <= 2``.
    Returns ``(sup, maximising xi)``.
    """
    if i > 2:
        raise InfeasibleError("exact supremum over all slopes is limited to i <= 2")
    u = i * i
    den = u if log2_den is None else int(log2_den)
    cnum = _block_over(i, numerators, log2_den, den)
    g, D, n = kernels.breakpoint_sup(cnum, 1 << den, backend=backend)
    return Fraction(g, 2 * D), Fraction(n, D)


def mutate_block(i: int, position: int, new_numerator: int | None = None) -> np.ndarray:
    """Copy of block ``i``'s numerators with entry ``position`` (1-based) changed.

    Default replacement shifts the value by 1/2, which always changes it.
    """
    nums = _block_numerators(i).copy()
    U = 1 << (i * i)
    nums[position - 1] = (nums[position - 1] + U // 2) % U if new_numerator is None else new_numerator % U
    return nums
