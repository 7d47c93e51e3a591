"""Command-line interface: ``danzerkit <subcommand> ...``.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 on invalid flags, 3 when an enumeration budget is exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import kernels, lattice, optical, peres, sud, verifiers
from .geometry import AxisBox
from .lattice import BudgetExceeded

CONSTRUCTIONS = ("corollary", "optical", "net", "peres-golden", "peres-sud")


class UsageError(Exception):
    pass


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _window(args, d: int) -> AxisBox:
    if args.window is None:
        raise UsageError("--window lo1 hi1 lo2 hi2 ... is required")
    if len(args.window) != 2 * d:
        raise UsageError(f"--window needs {2 * d} numbers for dimension {d}")
    try:
        return AxisBox.from_bounds(args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    c = args.construction
    if c == "net":
        net = optical.epsilon_net(args.dim, args.n, budget=args.budget)
        pts, d = net.points, args.dim
    elif c in ("peres-golden", "peres-sud"):
        kind = peres.GOLDEN if c == "peres-golden" else peres.SUD_DIGITAL
        pts = peres.peres_points(peres.PeresSpec(kind, _window(args, 2), budget=args.budget))
        d = 2
    else:
        d = args.dim
        spec = lattice.corollary_forest_spec(d, args.eta) if c == "corollary" else optical.optical_forest_spec(d)
        pts = lattice.enumerate_points(spec, _window(args, d), budget=args.budget)
    _emit(lattice.format_points_csv(pts, d), args.out)
    return 0


def _visibility_source(args, reach: float):
    c = args.construction
    if c == "corollary":
        return lattice.corollary_forest_spec(args.dim, args.eta), args.dim
    if c == "optical":
        return optical.optical_forest_spec(args.dim), args.dim
    if c in ("peres-golden", "peres-sud"):
        kind = peres.GOLDEN if c == "peres-golden" else peres.SUD_DIGITAL
        return peres.PeresForest.build(kind, reach), 2
    raise UsageError(f"visibility is not defined for construction {c!r}")


def _default_length(args, eps: float) -> float:
    if args.length is not None:
        return args.length
    if args.construction == "corollary":
        spec = lattice.corollary_forest_spec(args.dim, args.eta)
        return spec.hitting_length(spec.layer_index_for(eps))
    if args.construction == "peres-sud":
        return sud.peres_visibility(eps)
    raise UsageError(f"--length is required for {args.construction}")


def _hints(args, src) -> tuple:
    if isinstance(src, lattice.ForestSpec):
        out = []
        for j in src.layers_within(4096.0):
            out.extend(src.params(j)[1:])
            if j >= 8:
                break
        return tuple(out)
    return (1.0,)


def cmd_visibility(args) -> int:
    eps_list = [float(e) for e in args.epsilon]
    if any(not e > 0 for e in eps_list):
        raise UsageError("epsilons must be positive")
    base_half = args.base
    if args.curve:
        eps_list = sorted(set(eps_list), reverse=True)
        lad = verifiers.geometric_ladder(args.ladder_start, args.ladder_ratio, args.ladder_steps)
        src, d = _visibility_source(args, lad[-1] + base_half + 8)
        base = AxisBox.cube(d, -base_half, base_half)
        curve = verifiers.empirical_visibility_curve(
            src, eps_list, base, lad, seed=args.seed, count=args.count,
            include_adversarial=not args.no_adversarial, hints=_hints(args, src),
        )
        baseline = verifiers.curve_baseline(curve, d)
        fit = verifiers.curve_fit_exponent(curve)
        ok = baseline["all_finite"] and baseline["min_ratio"] is not None and baseline["min_ratio"] > 0
        report = {
            "construction": args.construction,
            "d": d,
            "curve": [{"epsilon": c.epsilon, "length": c.length, "probes": c.probes} for c in curve],
            "baseline": baseline,
            "fit": None if fit is None else {"C": fit[0], "exponent": fit[1]},
            "pass": ok,
        }
        if args.out_csv:
            _emit(verifiers.format_curve_csv(curve), args.out_csv)
        _emit(verifiers.dumps_report(report), args.out)
        return 0 if ok else 1
    lengths = [_default_length(args, e) for e in eps_list]
    src, d = _visibility_source(args, max(lengths) + base_half + 8)
    hints = _hints(args, src)
    probes = []
    for e, L in zip(eps_list, lengths):
        smp = verifiers.SegmentSampler(args.seed, args.count, L, AxisBox.cube(d, -base_half, base_half).expanded(L / 2),
                                       not args.no_adversarial, hints)
        probes.append(verifiers.visibility_probe(src, smp, e))
    ok = all(p.passed for p in probes)
    report = {"construction": args.construction, "d": d, "probes": [p.as_dict() for p in probes], "pass": ok}
    _emit(verifiers.dumps_report(report), args.out)
    return 0 if ok else 1


def cmd_netcheck(args) -> int:
    net = optical.epsilon_net(args.dim, args.n, budget=args.budget)
    report = net.report()
    eps = net.spec.epsilon
    if args.dim == 2:
        box = verifiers.largest_empty_rectangle_2d(net.points)
        report["max_empty_area"] = box.volume
    else:
        box = verifiers.empty_box_search_nd(net.points, args.dim, resolution=args.resolution)
        report["best_empty_volume_found"] = box.volume
        report["resolution"] = box.resolution
    report["empty_box"] = [box.box.lo.tolist(), box.box.hi.tolist()]
    report["exact"] = box.exact
    report["pass"] = box.volume < eps
    _emit(verifiers.dumps_report(report), args.out)
    return 0 if report["pass"] else 1


def _sequence_fn(name: str):
    if name == "sud":
        return sud.u_value
    if name == "interleave":
        return sud.interleave
    if name == "golden":
        return peres.golden_sequence
    raise UsageError(f"unknown sequence {name!r}")


def _num(x):
    """JSON-friendly rendering of an exact or float value."""
    if isinstance(x, Fraction):
        return {"exact": str(x), "value": float(x)}
    return {"exact": None, "value": float(x)}


def cmd_dispersion(args) -> int:
    if args.block_verify:
        if args.i is None:
            raise UsageError("--block-verify needs --i")
        try:
            rep = sud.block_sud_verify(args.i)
        except sud.InfeasibleError as exc:
            raise UsageError(str(exc)) from exc
        out = rep.as_dict()
        if args.exact_sup:
            try:
                val, xi = sud.block_exact_sup(args.i)
            except sud.InfeasibleError as exc:
                raise UsageError(str(exc)) from exc
            out["exact_sup_over_xi"] = _num(val)
            out["exact_sup_xi"] = str(xi)
            out["exact_sup_within_claim"] = val <= rep.claimed_bound
        _emit(verifiers.dumps_report(out), args.out)
        return 0 if rep.passed else 1
    if args.points:
        pts = [_fraction(p) for p in args.points]
        _emit(verifiers.dumps_report({"dispersion": _num(sud.exact_dispersion(pts))}), args.out)
        return 0
    if args.N is None:
        raise UsageError("give --points, --block-verify, or --N with a --sequence")
    seq = _sequence_fn(args.sequence)
    if args.m_max is not None:
        q = args.xi_grid
        xis = [Fraction(j, 2**q) for j in range(2**q)]
        lb = sud.sud_lower_bound(seq, args.N, range(args.m_max + 1), xis)
        out = {"sequence": args.sequence, "N": args.N, "m_range": [0, args.m_max], "xi_grid_log2": q,
               "lower_bound": _num(lb.value), "argmax_m": lb.m, "argmax_xi": str(lb.xi)}
    else:
        xi = _fraction(args.xi)
        v = sud.perturbed_dispersion(seq, sud.DispersionQuery(args.N, args.m, xi))
        out = {"sequence": args.sequence, "N": args.N, "m": args.m, "xi": str(xi), "dispersion": _num(v)}
    _emit(verifiers.dumps_report(out), args.out)
    return 0


def cmd_density(args) -> int:
    d = args.dim
    T = sorted(args.T)
    if args.construction == "corollary":
        spec = lattice.corollary_forest_spec(d, args.eta)
    elif args.construction == "optical":
        spec = optical.optical_forest_spec(d)
    else:
        raise UsageError("density supports corollary and optical")
    rep = verifiers.growth_fit(lambda t: lattice.count_in_ball(spec, t, budget=args.budget), T, d)
    out = {"construction": args.construction, "d": d, **rep.as_dict()}
    ok = True
    if args.construction == "corollary":
        bounds = []
        for t, r in zip(rep.T, rep.ratio_d):
            j = lattice.layer_for_radius(spec, t)
            b = lattice.series_density_bound(spec, j) if j >= 1 else 0.0
            bounds.append(b)
            ok = ok and r <= b
        out["series_density_bound"] = bounds
    out["pass"] = ok
    _emit(verifiers.dumps_report(out), args.out)
    return 0 if ok else 1


def cmd_seq(args) -> int:
    if args.start < 1 or args.stop < args.start:
        raise UsageError("need 1 <= start <= stop")
    fn = _sequence_fn(args.sequence)
    if args.sequence == "golden":
        raise UsageError("seq dumps the exact dyadic sequences only (sud, interleave)")
    lines = ["index,value_numerator,value_log2_denominator"]
    for n in range(args.start, args.stop + 1):
        v = fn(n)
        lines.append(f"{n},{v.numerator},{v.log2_denominator}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="danzerkit", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="numba thread count (results do not depend on it)")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, dim=True):
        if dim:
            sp.add_argument("--dim", type=int, default=2)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--budget", type=int, default=lattice.DEFAULT_BUDGET)

    g = sub.add_parser("gen", help="emit point CSV")
    g.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
    g.add_argument("--eta", type=float, default=1.0)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--window", type=float, nargs="+")
    common(g)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("visibility", help="visibility probes and empirical curves")
    v.add_argument("--construction", choices=("corollary", "optical", "peres-golden", "peres-sud"), required=True)
    v.add_argument("--eta", type=float, default=1.0)
    v.add_argument("--epsilon", type=float, nargs="+", required=True)
    v.add_argument("--length", type=float, default=None)
    v.add_argument("--base", type=float, default=16.0, help="segment midpoints lie in [-base, base]^d")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=200)
    v.add_argument("--no-adversarial", action="store_true")
    v.add_argument("--curve", action="store_true")
    v.add_argument("--ladder-start", type=float, default=0.5)
    v.add_argument("--ladder-ratio", type=float, default=math.sqrt(2))
    v.add_argument("--ladder-steps", type=int, default=48)
    v.add_argument("--out-csv", default=None)
    common(v)
    v.set_defaults(func=cmd_visibility)

    n = sub.add_parser("netcheck", help="epsilon-net empty-box check")
    n.add_argument("--n", type=int, required=True)
    n.add_argument("--resolution", type=int, default=16)
    common(n)
    n.set_defaults(func=cmd_netcheck)

    dsp = sub.add_parser("dispersion", help="dispersion measurements and block verification")
    dsp.add_argument("--points", nargs="+", default=None)
    dsp.add_argument("--sequence", choices=("sud", "interleave", "golden"), default="sud")
    dsp.add_argument("--N", type=int, default=None)
    dsp.add_argument("--m", type=int, default=0)
    dsp.add_argument("--xi", default="0")
    dsp.add_argument("--m-max", type=int, default=None)
    dsp.add_argument("--xi-grid", type=int, default=6, help="log2 of the slope grid size")
    dsp.add_argument("--block-verify", action="store_true")
    dsp.add_argument("--exact-sup", action="store_true")
    dsp.add_argument("--i", type=int, default=None)
    common(dsp, dim=False)
    dsp.set_defaults(func=cmd_dispersion)

    den = sub.add_parser("density", help="growth fit of ball counts")
    den.add_argument("--construction", choices=("corollary", "optical"), required=True)
    den.add_argument("--eta", type=float, default=1.0)
    den.add_argument("--T", type=float, nargs="+", default=[4, 8, 16, 32, 64])
    common(den)
    den.set_defaults(func=cmd_density)

    s = sub.add_parser("seq", help="dump u_n as CSV rows")
    s.add_argument("--start", type=int, default=1)
    s.add_argument("--stop", type=int, default=100)
    s.add_argument("--sequence", choices=("sud", "interleave"), default="sud")
    common(s, dim=False)
    s.set_defaults(func=cmd_seq)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    kernels.set_threads(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"danzerkit: error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"danzerkit: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OverflowError) as exc:
        print(f"danzerkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
