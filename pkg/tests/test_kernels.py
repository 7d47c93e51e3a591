"""The numba and numpy paths of every kernel agree."""

import numpy as np
import pytest

from danzerkit import kernels
from danzerkit.lattice import corollary_forest_spec
from danzerkit.geometry import AxisBox
from danzerkit.peres import golden_table
from danzerkit.sud import block_values

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not importable")


def test_backend_selection():
    assert kernels.BACKEND in ("numba", "numpy")
    with pytest.raises(ValueError):
        kernels._pick("fortran")


def test_points_kernel():
    rng = np.random.default_rng(0)
    P = rng.uniform(-5, 5, (500, 3))
    A = rng.uniform(-5, 5, (30, 3))
    B = A + rng.normal(0, 2, (30, 3))
    a = kernels.min_dist_points(P, A, B, backend="numba")
    b = kernels.min_dist_points(P, A, B, backend="numpy")
    assert np.allclose(a, b, atol=1e-12)
    assert np.all(np.isinf(kernels.min_dist_points(np.empty((0, 3)), A, B)))


def test_fiber_kernel_3d_and_early_exit():
    spec = corollary_forest_spec(3, 1.0)
    fib = spec.fibers(AxisBox.cube(3, -30, 30))
    rng = np.random.default_rng(1)
    A = rng.uniform(-10, 10, (25, 3))
    B = A + rng.normal(0, 6, (25, 3))
    a = kernels.min_dist_fibers(A, B, fib, 0.05, spec.covering_radius(), backend="numba")
    b = kernels.min_dist_fibers(A, B, fib, 0.05, spec.covering_radius(), backend="numpy")
    assert np.allclose(a, b, atol=1e-12)
    stop = kernels.min_dist_fibers(A, B, fib, 0.05, spec.covering_radius(), stop=0.3, backend="numba")
    assert np.all(np.where(a <= 0.3, stop <= 0.3, np.isclose(stop, a)))


def test_peres_kernel():
    t = golden_table(200)
    rng = np.random.default_rng(2)
    A = rng.uniform(-50, 50, (40, 2))
    B = A + rng.normal(0, 30, (40, 2))
    a = kernels.min_dist_peres(A, B, t, 0.01, 2.0, backend="numba")
    b = kernels.min_dist_peres(A, B, t, 0.01, 2.0, backend="numpy")
    assert np.allclose(a, b, atol=1e-12)


def test_gap_kernels():
    cnum = block_values(2).numerators() * 16
    M = 256
    rng = np.random.default_rng(3)
    starts = rng.integers(1, 512 - 16, 100)
    xis = rng.integers(0, M, 100)
    a = kernels.window_max_gaps(cnum, M, starts, xis, 16, backend="numba")
    b = kernels.window_max_gaps(cnum, M, starts, xis, 16, backend="numpy")
    assert np.array_equal(a, b)
    c1 = block_values(1).numerators()
    assert kernels.breakpoint_sup(c1, 2, backend="numba") == kernels.breakpoint_sup(c1, 2, backend="numpy")


@pytest.mark.parametrize("width", [1, 2, 3, 7, 64])
@pytest.mark.parametrize("modulus", [2, 5, 97, 4096])
def test_window_gaps_against_sorted_gaps(width, modulus):
    # the bucket shortcut must agree with plain sorting, including tiny spans
    rng = np.random.default_rng(width * 1000 + modulus)
    cnum = rng.integers(0, modulus, 400)
    starts = rng.integers(1, 400 - width + 2, 50)
    xis = rng.integers(0, modulus, 50)
    want = []
    for s0, xi in zip(starts, xis):
        k = np.arange(s0, s0 + width)
        v = np.sort((cnum[k - 1] - (k * xi) % modulus) % modulus)
        want.append(max(np.append(np.diff(v), v[0] + modulus - v[-1])))
    for be in ("numba", "numpy"):
        assert kernels.window_max_gaps(cnum, modulus, starts, xis, width, backend=be).tolist() == want


def test_ler_kernel():
    rng = np.random.default_rng(4)
    pts = rng.uniform(-0.5, 0.5, (300, 2))
    a = kernels.largest_empty_rectangle(pts[:, 0], pts[:, 1], (-0.5, 0.5, -0.5, 0.5), backend="numba")
    b = kernels.largest_empty_rectangle(pts[:, 0], pts[:, 1], (-0.5, 0.5, -0.5, 0.5), backend="numpy")
    assert a[0] == pytest.approx(b[0], abs=1e-15)


def test_env_flag_selects_numpy(tmp_path):
    import subprocess, sys

    code = "from danzerkit import kernels; print(kernels.BACKEND)"
    env = {"DANZERKIT_DISABLE_NUMBA": "1", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
