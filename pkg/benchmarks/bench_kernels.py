"""Time the numba kernels against the pure-numpy fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--threads N]

Both backends are called explicitly, so the DANZERKIT_DISABLE_NUMBA flag is
irrelevant here.  Each row also checks that the two outputs agree.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from danzerkit import kernels, sud
from danzerkit.geometry import AxisBox
from danzerkit.lattice import corollary_forest_spec
from danzerkit.optical import epsilon_net
from danzerkit.peres import GOLDEN, PeresForest
from danzerkit.verifiers import SegmentSampler, segment_distances


def _segments(seed, count, length, half):
    smp = SegmentSampler(seed, count, length, AxisBox.cube(2, -half, half), include_adversarial=False)
    return smp.segments()


def case_points():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-20, 20, size=(20000, 2))
    A, B = _segments(2, 400, 10.0, 20.0)
    return lambda be: kernels.min_dist_points(pts, A, B, backend=be)


def case_fibers():
    spec = corollary_forest_spec(2, 1.0)
    A, B = _segments(3, 2000, 2 * math.sqrt(2) * 144, 288.0)
    region = AxisBox.cube(2, -600, 600)
    return lambda be: segment_distances(spec, A, B, region, r0=0.25, backend=be)


def case_peres():
    forest = PeresForest.build(GOLDEN, 2000)
    A, B = _segments(4, 2000, 200.0, 500.0)
    return lambda be: forest.segment_distances(A, B, r0=0.5, backend=be)


def case_block_verify():
    return lambda be: np.asarray([float(sud.block_sud_verify(3, full_block=False, backend=be).max_window_defect)])


def case_empty_rectangle():
    pts = epsilon_net(2, 3).points
    return lambda be: np.asarray([kernels.largest_empty_rectangle(pts[:, 0], pts[:, 1], (-0.5, 0.5, -0.5, 0.5), backend=be)[0]])


CASES = {
    "points (20k pts x 400 segs)": case_points,
    "lattice fibers (2000 segs)": case_fibers,
    "peres columns (2000 segs)": case_peres,
    "block verify i=3": case_block_verify,
    "empty rectangle (3129 pts)": case_empty_rectangle,
}


def _time(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    kernels.set_threads(args.threads)
    print(f"{'case':32s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}  agree")
    for name, make in CASES.items():
        fn = make()
        fn("numba")  # compile outside the timing
        t_nb, r_nb = _time(lambda: fn("numba"), args.repeat)
        t_np, r_np = _time(lambda: fn("numpy"), args.repeat)
        agree = np.allclose(r_nb, r_np, rtol=0, atol=1e-12)
        print(f"{name:32s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}  {agree}")


if __name__ == "__main__":
    main()
