"""Hot numeric loops.

Every kernel exists twice: a compiled loop version (numba ``@njit``) and a
vectorised pure-numpy version.  :data:`BACKEND` picks one at import time;
setting ``DANZERKIT_DISABLE_NUMBA=1`` forces the numpy path.  Both paths
return identical results (integer kernels) or agree to rounding (float
kernels); ``tests/test_kernels.py`` checks this and
``benchmarks/bench_kernels.py`` times them against each other.

Public wrappers take a ``backend`` keyword ("numba" or "numpy") so both
paths can be exercised side by side in one process.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
if HAVE_NUMBA:
    # prefer layers that need no external TBB runtime
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
_DISABLED = os.environ.get("DANZERKIT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def _njit(fn):
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True)(fn)


def _njit_par(fn):
    # per-row loops; every row writes only its own output slot
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True, parallel=True)(fn)


_prange = numba.prange if numba is not None else range


def _pick(backend):
    backend = backend or BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:  # pragma: no cover
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def set_threads(n: int | None) -> None:
    """Set the numba thread count (no-op on the numpy path).

    Parallel kernels split work by independent rows, so results never depend
    on the thread count.
    """
    if n and HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# point-to-segment distances
# ---------------------------------------------------------------------------


@_njit
def _seg_dist2(x, A, B, s):
    d = A.shape[1]
    vv = 0.0
    c1 = 0.0
    for t in range(d):
        v = B[s, t] - A[s, t]
        vv += v * v
        c1 += (x[t] - A[s, t]) * v
    if c1 <= 0.0:
        lam = 0.0
    elif c1 >= vv:
        lam = 1.0
    else:
        lam = c1 / vv
    acc = 0.0
    for t in range(d):
        diff = x[t] - (A[s, t] + lam * (B[s, t] - A[s, t]))
        acc += diff * diff
    return acc


@_njit_par
def _nb_min_dist_points(points, A, B):
    S = A.shape[0]
    N, d = points.shape
    out = np.empty(S)
    for s in _prange(S):
        x = np.empty(d)
        best = np.inf
        for n in range(N):
            for t in range(d):
                x[t] = points[n, t]
            dd = _seg_dist2(x, A, B, s)
            if dd < best:
                best = dd
        out[s] = math.sqrt(best)
    return out


def _np_min_dist_points(points, A, B, chunk=1 << 20):
    out = np.empty(A.shape[0])
    for s in range(A.shape[0]):
        a, b = A[s], B[s]
        v = b - a
        vv = float(v @ v)
        best = np.inf
        for lo in range(0, points.shape[0], chunk):
            w = points[lo:lo + chunk] - a
            lam = np.clip((w @ v) / vv, 0.0, 1.0)
            diff = w - lam[:, None] * v
            best = min(best, float(np.min(np.einsum("ij,ij->i", diff, diff))))
        out[s] = math.sqrt(best)
    return out


def min_dist_points(points, A, B, backend=None) -> np.ndarray:
    """For each segment ``[A[s], B[s]]`` the distance to the nearest of ``points``."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    if points.shape[0] == 0:
        return np.full(A.shape[0], np.inf)
    if _pick(backend) == "numba":
        return _nb_min_dist_points(points, A, B)
    return _np_min_dist_points(points, A, B)


# ---------------------------------------------------------------------------
# distances to unions of hyperplane lattices ("fibers")
#
# A fiber is the set {x : x[axis] = coord, x[b] in offset + spacing*Z for b != axis}.
# Fibers are sorted by (axis, coord); axis_ptr[a]:axis_ptr[a+1] slices axis a.
# The search radius doubles until a point within it is found, so the result
# is the exact minimum over the (infinite) fiber union, capped at rmax.
# ---------------------------------------------------------------------------


@_njit_par
def _nb_min_dist_fibers(A, B, axis_ptr, coords, spacing, offset, r0, rmax, stop2):
    S, d = A.shape
    out = np.empty(S)
    for s in _prange(S):
        x = np.empty(d)
        mlo = np.zeros(d, np.int64)
        mhi = np.zeros(d, np.int64)
        m = np.zeros(d, np.int64)
        best2 = np.inf
        r = r0
        while True:
            for ax in range(d):
                f0 = axis_ptr[ax]
                f1 = axis_ptr[ax + 1]
                if f1 <= f0:
                    continue
                pa = A[s, ax]
                da = B[s, ax] - pa
                lo_c = min(pa, pa + da) - r
                hi_c = max(pa, pa + da) + r
                i0 = f0 + np.searchsorted(coords[f0:f1], lo_c)
                i1 = f0 + np.searchsorted(coords[f0:f1], hi_c, side="right")
                for f in range(i0, i1):
                    if best2 <= stop2:
                        break
                    rr = min(r, math.sqrt(best2))
                    c = coords[f]
                    h = spacing[f]
                    off = offset[f]
                    if abs(da) <= 1e-300:
                        if abs(pa - c) > rr:
                            continue
                        t0 = 0.0
                        t1 = 1.0
                    else:
                        t0 = (c - rr - pa) / da
                        t1 = (c + rr - pa) / da
                        if t0 > t1:
                            t0, t1 = t1, t0
                        t0 = max(t0, 0.0)
                        t1 = min(t1, 1.0)
                        if t0 > t1:
                            continue
                    empty = False
                    for b in range(d):
                        if b == ax:
                            continue
                        xb0 = A[s, b] + t0 * (B[s, b] - A[s, b])
                        xb1 = A[s, b] + t1 * (B[s, b] - A[s, b])
                        lo = min(xb0, xb1) - rr
                        hi = max(xb0, xb1) + rr
                        mlo[b] = math.ceil((lo - off) / h)
                        mhi[b] = math.floor((hi - off) / h)
                        if mlo[b] > mhi[b]:
                            empty = True
                            break
                    if empty:
                        continue
                    for b in range(d):
                        m[b] = mlo[b]
                    x[ax] = c
                    while True:
                        for b in range(d):
                            if b != ax:
                                x[b] = off + m[b] * h
                        dd = _seg_dist2(x, A, B, s)
                        if dd < best2:
                            best2 = dd
                        advanced = False
                        for b in range(d):
                            if b == ax:
                                continue
                            if m[b] < mhi[b]:
                                m[b] += 1
                                advanced = True
                                break
                            m[b] = mlo[b]
                        if not advanced:
                            break
            if best2 <= r * r or best2 <= stop2 or r >= rmax:
                break
            r = min(2.0 * r, rmax)
        out[s] = math.sqrt(best2)
    return out


def _np_min_dist_fibers(A, B, axis_ptr, coords, spacing, offset, r0, rmax, stop2):
    S, d = A.shape
    out = np.empty(S)
    for s in range(S):
        a, b = A[s], B[s]
        v = b - a
        vv = float(v @ v)
        best2 = np.inf
        r = r0
        while True:
            for ax in range(d):
                f0, f1 = axis_ptr[ax], axis_ptr[ax + 1]
                lo_c = min(a[ax], b[ax]) - r
                hi_c = max(a[ax], b[ax]) + r
                i0 = f0 + np.searchsorted(coords[f0:f1], lo_c)
                i1 = f0 + np.searchsorted(coords[f0:f1], hi_c, side="right")
                da = v[ax]
                for f in range(i0, i1):
                    if best2 <= stop2:
                        break
                    rr = min(r, math.sqrt(best2))
                    c, h, off = coords[f], spacing[f], offset[f]
                    if abs(da) <= 1e-300:
                        if abs(a[ax] - c) > rr:
                            continue
                        t0, t1 = 0.0, 1.0
                    else:
                        t0, t1 = sorted(((c - rr - a[ax]) / da, (c + rr - a[ax]) / da))
                        t0, t1 = max(t0, 0.0), min(t1, 1.0)
                        if t0 > t1:
                            continue
                    others = [q for q in range(d) if q != ax]
                    x0 = a[others] + t0 * v[others]
                    x1 = a[others] + t1 * v[others]
                    lo = np.minimum(x0, x1) - rr
                    hi = np.maximum(x0, x1) + rr
                    mlo = np.ceil((lo - off) / h).astype(np.int64)
                    mhi = np.floor((hi - off) / h).astype(np.int64)
                    if np.any(mlo > mhi):
                        continue
                    grids = np.meshgrid(*[np.arange(l0, l1 + 1) for l0, l1 in zip(mlo, mhi)], indexing="ij")
                    pts = np.empty((grids[0].size, d))
                    pts[:, ax] = c
                    for q, g in zip(others, grids):
                        pts[:, q] = off + g.ravel() * h
                    w = pts - a
                    lam = np.clip((w @ v) / vv, 0.0, 1.0)
                    diff = w - lam[:, None] * v
                    best2 = min(best2, float(np.min(np.einsum("ij,ij->i", diff, diff))))
            if best2 <= r * r or best2 <= stop2 or r >= rmax:
                break
            r = min(2.0 * r, rmax)
        out[s] = math.sqrt(best2)
    return out


def min_dist_fibers(A, B, fibers, r0: float, rmax: float, stop: float = -1.0, backend=None) -> np.ndarray:
    """For each segment, the distance to the nearest point of a fiber union.

    ``fibers`` is a tuple ``(axis_ptr, coords, spacing, offset)`` as produced by
    :func:`pack_fibers`.  Segments with no point within ``rmax`` get ``inf``
    (or the best distance found on the way, if larger than ``rmax``).
    With ``stop >= 0`` a segment's scan ends as soon as a point within
    ``stop`` is found; its value is then only an upper bound below ``stop``.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    axis_ptr, coords, spacing, offset = fibers
    r0 = float(max(r0, 1e-12))
    rmax = float(max(rmax, r0))
    stop2 = float(stop) ** 2 if stop >= 0 else -1.0
    if _pick(backend) == "numba":
        return _nb_min_dist_fibers(A, B, axis_ptr, coords, spacing, offset, r0, rmax, stop2)
    return _np_min_dist_fibers(A, B, axis_ptr, coords, spacing, offset, r0, rmax, stop2)


def pack_fibers(dim: int, axis, coords, spacing, offset):
    """Sort fiber arrays by (axis, coord) and build the per-axis index."""
    axis = np.asarray(axis, dtype=np.int64)
    coords = np.asarray(coords, dtype=np.float64)
    spacing = np.broadcast_to(np.asarray(spacing, dtype=np.float64), coords.shape)
    offset = np.broadcast_to(np.asarray(offset, dtype=np.float64), coords.shape)
    order = np.lexsort((coords, axis))
    axis_sorted = axis[order]
    axis_ptr = np.searchsorted(axis_sorted, np.arange(dim + 1)).astype(np.int64)
    return (
        axis_ptr,
        np.ascontiguousarray(coords[order]),
        np.ascontiguousarray(spacing[order]),
        np.ascontiguousarray(offset[order]),
    )


# ---------------------------------------------------------------------------
# distances to planar Peres-type forests
#
# Columns x = k (k != 0) carry y in table[|k|] + Z; rows y = k carry
# x in -table[|k|] + Z (the quarter-turn image of the columns).  No fiber
# arrays are built, so segments of length ~1e7 stay cheap.
# ---------------------------------------------------------------------------


@_njit
def _nb_peres_axis(A, B, s, table, ax, sign, r, best2, stop2, x):
    oth = 1 - ax
    pa = A[s, ax]
    da = B[s, ax] - pa
    k0 = math.ceil(min(pa, pa + da) - r)
    k1 = math.floor(max(pa, pa + da) + r)
    for k in range(k0, k1 + 1):
        if k == 0:
            continue
        if best2 <= stop2:
            break
        rr = min(r, math.sqrt(best2))
        if abs(da) <= 1e-300:
            if abs(pa - k) > rr:
                continue
            t0 = 0.0
            t1 = 1.0
        else:
            t0 = (k - rr - pa) / da
            t1 = (k + rr - pa) / da
            if t0 > t1:
                t0, t1 = t1, t0
            t0 = max(t0, 0.0)
            t1 = min(t1, 1.0)
            if t0 > t1:
                continue
        off = sign * table[abs(k)]
        y0 = A[s, oth] + t0 * (B[s, oth] - A[s, oth])
        y1 = A[s, oth] + t1 * (B[s, oth] - A[s, oth])
        m0 = math.ceil(min(y0, y1) - rr - off)
        m1 = math.floor(max(y0, y1) + rr - off)
        x[ax] = k
        for m in range(m0, m1 + 1):
            x[oth] = off + m
            dd = _seg_dist2(x, A, B, s)
            if dd < best2:
                best2 = dd
    return best2


@_njit_par
def _nb_min_dist_peres(A, B, table, r0, rmax, stop2):
    S = A.shape[0]
    out = np.empty(S)
    for s in _prange(S):
        x = np.empty(2)
        best2 = np.inf
        r = r0
        while True:
            best2 = _nb_peres_axis(A, B, s, table, 0, 1.0, r, best2, stop2, x)
            best2 = _nb_peres_axis(A, B, s, table, 1, -1.0, r, best2, stop2, x)
            if best2 <= r * r or best2 <= stop2 or r >= rmax:
                break
            r = min(2.0 * r, rmax)
        out[s] = math.sqrt(best2)
    return out


def _np_peres_axis(a, v, table, ax, sign, r, best2, chunk=1 << 20):
    oth = 1 - ax
    lo_k = math.ceil(min(a[ax], a[ax] + v[ax]) - r)
    hi_k = math.floor(max(a[ax], a[ax] + v[ax]) + r)
    k = np.arange(lo_k, hi_k + 1, dtype=np.int64)
    k = k[k != 0]
    rr = min(r, math.sqrt(best2))
    if abs(v[ax]) <= 1e-300:
        k = k[np.abs(a[ax] - k) <= rr]
        t0 = np.zeros(k.size)
        t1 = np.ones(k.size)
    else:
        ta = (k - rr - a[ax]) / v[ax]
        tb = (k + rr - a[ax]) / v[ax]
        t0 = np.maximum(np.minimum(ta, tb), 0.0)
        t1 = np.minimum(np.maximum(ta, tb), 1.0)
        keep = t0 <= t1
        k, t0, t1 = k[keep], t0[keep], t1[keep]
    off = sign * table[np.abs(k)]
    y0 = a[oth] + t0 * v[oth]
    y1 = a[oth] + t1 * v[oth]
    m0 = np.ceil(np.minimum(y0, y1) - rr - off).astype(np.int64)
    m1 = np.floor(np.maximum(y0, y1) + rr - off).astype(np.int64)
    cnt = np.maximum(m1 - m0 + 1, 0)
    vv = float(v @ v)
    start = 0
    while start < k.size:
        stop = start + max(1, int(np.searchsorted(np.cumsum(cnt[start:]), chunk, side="right")))
        c = cnt[start:stop]
        total = int(c.sum())
        if total:
            idx = np.repeat(np.arange(start, stop), c)
            first = np.repeat(np.cumsum(c) - c, c)
            m = m0[idx] + (np.arange(total) - first)
            pts = np.empty((total, 2))
            pts[:, ax] = k[idx]
            pts[:, oth] = off[idx] + m
            w = pts - a
            lam = np.clip((w @ v) / vv, 0.0, 1.0)
            diff = w - lam[:, None] * v
            best2 = min(best2, float(np.min(np.einsum("ij,ij->i", diff, diff))))
        start = stop
    return best2


def _np_min_dist_peres(A, B, table, r0, rmax, stop2):
    out = np.empty(A.shape[0])
    for s in range(A.shape[0]):
        a, v = A[s], B[s] - A[s]
        best2 = np.inf
        r = r0
        while True:
            best2 = _np_peres_axis(a, v, table, 0, 1.0, r, best2)
            best2 = _np_peres_axis(a, v, table, 1, -1.0, r, best2)
            if best2 <= r * r or best2 <= stop2 or r >= rmax:
                break
            r = min(2.0 * r, rmax)
        out[s] = math.sqrt(best2)
    return out


def min_dist_peres(A, B, table, r0: float, rmax: float, stop: float = -1.0, backend=None) -> np.ndarray:
    """Distance from each planar segment to the Peres-type forest of ``table``.

    ``table[n]`` is the sequence value ``a_n`` (``table[0]`` is never read).
    The table must cover every ``|k|`` within ``rmax`` of the segments.
    ``stop`` has the same early-exit meaning as in :func:`min_dist_fibers`.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    table = np.ascontiguousarray(table, dtype=np.float64)
    if A.shape[0] == 0:
        return np.empty(0)
    r0 = float(max(r0, 1e-12))
    rmax = float(max(rmax, r0))
    need = math.floor(max(np.abs(A).max(), np.abs(B).max()) + rmax) + 1
    if need >= table.shape[0]:
        raise ValueError(f"sequence table has {table.shape[0] - 1} terms, segments need {need}")
    stop2 = float(stop) ** 2 if stop >= 0 else -1.0
    if _pick(backend) == "numba":
        return _nb_min_dist_peres(A, B, table, r0, rmax, stop2)
    return _np_min_dist_peres(A, B, table, r0, rmax, stop2)


# ---------------------------------------------------------------------------
# circular gaps of integer residues
# ---------------------------------------------------------------------------


@_njit_par
def _nb_window_max_gaps(cnum, modulus, starts, xis, width):
    # pigeonhole max gap: buckets of size ceil(span/(width-1)) number at most
    # width, and no within-bucket difference reaches the largest gap, so
    # per-bucket min/max suffice (no sort)
    R = starts.shape[0]
    out = np.empty(R, np.int64)
    for row in _prange(R):
        buf = np.empty(width, np.int64)
        bmin = np.empty(width, np.int64)
        bmax = np.empty(width, np.int64)
        k0 = starts[row]
        xi = xis[row]
        lo = modulus
        hi = -1
        for j in range(width):
            k = k0 + j
            v = (cnum[k - 1] - (k * xi) % modulus) % modulus
            buf[j] = v
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        g = lo + modulus - hi
        if hi > lo:
            size = (hi - lo + width - 2) // (width - 1)
            nb = (hi - lo) // size + 1
            for b in range(nb):
                bmin[b] = hi + 1
                bmax[b] = -1
            for j in range(width):
                b = (buf[j] - lo) // size
                if buf[j] < bmin[b]:
                    bmin[b] = buf[j]
                if buf[j] > bmax[b]:
                    bmax[b] = buf[j]
            prev = bmax[0]
            for b in range(1, nb):
                if bmax[b] >= 0:
                    if bmin[b] - prev > g:
                        g = bmin[b] - prev
                    prev = bmax[b]
        out[row] = g
    return out


def _np_window_max_gaps(cnum, modulus, starts, xis, width, chunk_elems=1 << 23):
    R = starts.shape[0]
    out = np.empty(R, np.int64)
    rows = max(1, chunk_elems // max(width, 1))
    js = np.arange(width, dtype=np.int64)
    for lo in range(0, R, rows):
        k = starts[lo:lo + rows, None] + js[None, :]
        vals = (cnum[k - 1] - (k * xis[lo:lo + rows, None]) % modulus) % modulus
        vals.sort(axis=1)
        gaps = np.diff(vals, axis=1)
        wrap = vals[:, 0] + modulus - vals[:, -1]
        out[lo:lo + rows] = np.maximum(wrap, gaps.max(axis=1) if width > 1 else wrap)
    return out


def window_max_gaps(cnum, modulus: int, starts, xis, width: int, backend=None) -> np.ndarray:
    """Largest circular gap of ``{c_k - k*xi mod M : k in [start, start+width)}`` per row.

    ``cnum`` holds block numerators over ``modulus`` (1-based index ``k`` maps
    to ``cnum[k-1]``); ``xis`` are numerators over ``modulus`` too.  Everything
    is exact int64 arithmetic; callers guarantee ``k*xi`` fits.
    """
    cnum = np.ascontiguousarray(cnum, dtype=np.int64)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    xis = np.ascontiguousarray(xis, dtype=np.int64)
    if _pick(backend) == "numba":
        return _nb_window_max_gaps(cnum, int(modulus), starts, xis, int(width))
    return _np_window_max_gaps(cnum, int(modulus), starts, xis, int(width))


@_njit
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@_njit
def _nb_breakpoint_sup(cnum, cmod):
    V = cnum.shape[0]
    buf = np.empty(V, np.int64)
    best_g = 0
    best_D = 1
    best_n = 0
    for b in range(1, V):
        D = cmod * b
        for n in range(D):
            if n > 0 and _gcd(n, b) > 1:
                continue
            for t in range(V):
                k = t + 1
                buf[t] = (cnum[t] * b - (k * n) % D) % D
            buf.sort()
            g = buf[0] + D - buf[V - 1]
            for t in range(V - 1):
                gap = buf[t + 1] - buf[t]
                if gap > g:
                    g = gap
            if g * best_D > best_g * D:
                best_g = g
                best_D = D
                best_n = n
    return best_g, best_D, best_n


def _np_breakpoint_sup(cnum, cmod):
    V = cnum.shape[0]
    k = np.arange(1, V + 1, dtype=np.int64)
    best = (0, 1, 0)
    for b in range(1, V):
        D = cmod * b
        n = np.arange(D, dtype=np.int64)
        keep = (n == 0) | (np.gcd(n, b) == 1)
        n = n[keep]
        vals = (cnum[None, :] * b - (n[:, None] * k[None, :]) % D) % D
        vals.sort(axis=1)
        g = np.maximum(vals[:, 0] + D - vals[:, -1], np.diff(vals, axis=1).max(axis=1))
        idx = int(np.argmax(g))
        if int(g[idx]) * best[1] > best[0] * D:
            best = (int(g[idx]), D, int(n[idx]))
    return best


def breakpoint_sup(cnum, cmod: int, backend=None):
    """Exact ``sup_xi max_gap{c_k - k*xi}`` over the circle, for ``c_k = cnum[k-1]/cmod``.

    Between two consecutive values of xi at which two points of the set
    collide, every gap is affine in xi, so the largest gap is convex there and
    the supremum is attained at a collision.  Collisions occur only at
    ``xi = n / (cmod * b)`` with ``1 <= b < len(cnum)``; all of them are scanned.
    Returns ``(gap_numerator, denominator, xi_numerator)``: the largest gap is
    ``gap_numerator / denominator`` attained at ``xi = xi_numerator / denominator``.
    """
    cnum = np.ascontiguousarray(cnum, dtype=np.int64)
    if _pick(backend) == "numba":
        g, D, n = _nb_breakpoint_sup(cnum, int(cmod))
        return int(g), int(D), int(n)
    return _np_breakpoint_sup(cnum, int(cmod))


# ---------------------------------------------------------------------------
# largest empty axis-parallel rectangle (exact O(n^2) sweep)
# ---------------------------------------------------------------------------


@_njit
def _nb_ler_sweep(xs, ys, x0, x1, y0, y1, best):
    # xs sorted ascending; best = [area, bx0, bx1, by0, by1] updated in place
    n = xs.shape[0]
    for i in range(n):
        xi = xs[i]
        yi = ys[i]
        top = y1
        bot = y0
        broken = False
        for j in range(i + 1, n):
            if xs[j] == xi:
                continue
            yj = ys[j]
            if yj <= bot or yj >= top:
                continue
            area = (xs[j] - xi) * (top - bot)
            if area > best[0]:
                best[0] = area
                best[1] = xi
                best[2] = xs[j]
                best[3] = bot
                best[4] = top
            if yj > yi:
                top = yj
            elif yj < yi:
                bot = yj
            else:
                broken = True
                break
        if not broken:
            area = (x1 - xi) * (top - bot)
            if area > best[0]:
                best[0] = area
                best[1] = xi
                best[2] = x1
                best[3] = bot
                best[4] = top


def _np_ler_sweep(xs, ys, x0, x1, y0, y1, best):
    n = xs.shape[0]
    for i in range(n):
        xi, yi = xs[i], ys[i]
        j = np.arange(i + 1, n)
        j = j[xs[j] != xi]
        yj = ys[j]
        stop = np.flatnonzero(yj == yi)
        broken = stop.size > 0
        if broken:
            j, yj = j[:stop[0] + 1], yj[:stop[0] + 1]
        up = np.where(yj > yi, yj, y1)
        dn = np.where(yj < yi, yj, y0)
        top_after = np.minimum.accumulate(np.minimum(up, y1)) if yj.size else np.empty(0)
        bot_after = np.maximum.accumulate(np.maximum(dn, y0)) if yj.size else np.empty(0)
        top_before = np.concatenate(([y1], top_after[:-1]))[: yj.size]
        bot_before = np.concatenate(([y0], bot_after[:-1]))[: yj.size]
        ok = (yj > bot_before) & (yj < top_before)
        if np.any(ok):
            areas = np.where(ok, (xs[j] - xi) * (top_before - bot_before), -1.0)
            q = int(np.argmax(areas))
            if areas[q] > best[0]:
                best[:] = (areas[q], xi, xs[j[q]], bot_before[q], top_before[q])
        if not broken:
            top = top_after[-1] if yj.size else y1
            bot = bot_after[-1] if yj.size else y0
            area = (x1 - xi) * (top - bot)
            if area > best[0]:
                best[:] = (area, xi, x1, bot, top)


def largest_empty_rectangle(xs, ys, bounds, backend=None):
    """Largest open axis-parallel rectangle in ``bounds`` containing no input point.

    ``bounds = (x0, x1, y0, y1)``; points must lie in the closed bounds.
    Returns ``(area, (bx0, bx1, by0, by1))``.  Points on the boundary of the
    returned rectangle are allowed.
    """
    x0, x1, y0, y1 = (float(v) for v in bounds)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    best = np.zeros(5)
    # full-width strips between consecutive y values
    yy = np.unique(np.concatenate(([y0, y1], ys)))
    g = np.diff(yy)
    q = int(np.argmax(g))
    best[:] = ((x1 - x0) * g[q], x0, x1, yy[q], yy[q + 1])
    sweep = _nb_ler_sweep if _pick(backend) == "numba" else _np_ler_sweep
    if xs.size:
        order = np.lexsort((ys, xs))
        sweep(np.ascontiguousarray(xs[order]), np.ascontiguousarray(ys[order]), x0, x1, y0, y1, best)
        # mirrored sweep covers rectangles whose left side is the wall
        mx = -xs
        order = np.lexsort((ys, mx))
        mbest = best.copy()
        mbest[1], mbest[2] = -best[2], -best[1]
        sweep(np.ascontiguousarray(mx[order]), np.ascontiguousarray(ys[order]), -x1, -x0, y0, y1, mbest)
        if mbest[0] > best[0]:
            best[:] = (mbest[0], -mbest[2], -mbest[1], mbest[3], mbest[4])
    return float(best[0]), (float(best[1]), float(best[2]), float(best[3]), float(best[4]))
