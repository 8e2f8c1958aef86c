"""Command-line front end.

Exit codes: 0 success, 1 domain/validation error, 2 numerical-accuracy
error. Every JSON report carries a version stamp and the full echoed
configuration; identical argv produce byte-identical primary outputs.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .curves import CurveSpec, MINUS_SHIFT, PLUS_SHIFT, STRAIGHT, verify_regularity
from .errors import AccuracyError, CurverateError, DomainValidationError
from .exponents import HOLDER, LIPSCHITZ, Regime, law_for, region_curve
from .experiments import (
    ExperimentPlan,
    build_profile,
    run as run_experiment,
    sharpness_sweep,
)
from .initial_data import (
    BOURGAIN,
    BUMP_MODULATED,
    GAUSSIAN_LIKE,
    bourgain_profile,
    gaussian_like,
    sobolev_norm,
)
from .maximal import (
    TimeGrid,
    admissible_window,
    calibrate_window_constant,
    critical_time,
    family_curve_kind,
    lemma_bound,
    lemma_empirical,
    maximal_field,
    rate_ceiling_demo,
    window_grid,
)
from .propagator import QuadratureSpec, evaluate
from .reports import envelope, write_csv, write_gnuplot, write_report

_CURVES = {"minus": MINUS_SHIFT, "plus": PLUS_SHIFT, "straight": STRAIGHT}
_LEMMA_REGIMES = {
    1: lambda d, alpha: Regime(d=d, alpha=1, m=2, smoothness=LIPSCHITZ),
    2: lambda d, alpha: Regime(d=1, alpha=alpha, m=2, smoothness=HOLDER),
    3: lambda d, alpha: Regime(d=1, alpha=alpha, m=2, smoothness=HOLDER),
    4: lambda d, alpha: Regime(d=1, alpha=alpha, m=2, smoothness=HOLDER),
}


def _maybe_fraction(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        return float(text)


def _quad_from_args(args) -> QuadratureSpec:
    return QuadratureSpec(
        base_nodes=args.quad_base_nodes,
        nodes_per_radian=args.quad_nodes_per_radian,
        panel_order=args.quad_panel_order,
        max_nodes=args.quad_max_nodes,
        self_check=not args.quad_no_self_check,
    )


def _add_quad_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quad-base-nodes", type=int, default=256)
    p.add_argument("--quad-nodes-per-radian", type=float, default=10.0 / (2.0 * math.pi))
    p.add_argument("--quad-panel-order", type=int, default=16)
    p.add_argument("--quad-max-nodes", type=int, default=2 ** 22)
    p.add_argument("--quad-no-self-check", action="store_true")
    p.add_argument("--out", type=str, default=None, help="write the JSON report here")


def _emit(args, command: str, config: dict, result: dict) -> None:
    text = write_report(getattr(args, "out", None), envelope(command, config, result))
    sys.stdout.write(text)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CURVERATE_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_exponent(args) -> int:
    regime = Regime(
        d=args.d,
        alpha=_maybe_fraction(args.alpha),
        m=_maybe_fraction(args.m),
        smoothness=args.smoothness,
    )
    law = law_for(regime)
    lo = _maybe_fraction(args.delta_min)
    hi = _maybe_fraction(args.delta_max)
    step = (hi - lo) / args.steps
    deltas = [lo + i * step for i in range(args.steps)]
    samples, annotations = region_curve(regime, deltas)
    rows = [(float(d), float(s), idx) for d, s, idx in samples]
    if args.mode == "table":
        sys.stdout.write("delta,s,piece_index\n")
        for d, s, idx in rows:
            sys.stdout.write(f"{d!r},{s!r},{idx}\n")
        if args.out:
            write_csv(args.out, ["delta", "s", "piece_index"], rows)
        return 0
    config = {
        "d": args.d,
        "alpha": str(args.alpha),
        "m": str(args.m),
        "smoothness": args.smoothness,
        "delta_min": str(args.delta_min),
        "delta_max": str(args.delta_max),
        "steps": args.steps,
    }
    result = {
        "regime_id": law.regime_id,
        "delta_max": float(law.delta_max),
        "samples": [[d, s, idx] for d, s, idx in rows],
        "breakpoints": [float(b) for b in law.breakpoints],
        "annotations": [
            {"kind": a["kind"], "delta": float(a["delta"]), "s": float(a["s"])}
            for a in annotations
        ],
    }
    _emit(args, "exponent-region", config, result)
    if args.out:
        write_csv(args.out.rsplit(".", 1)[0] + ".csv", ["delta", "s", "piece_index"], rows)
    return 0


def cmd_curve(args) -> int:
    spec = CurveSpec(_CURVES[args.kind], alpha=args.alpha, d=args.d)
    n = max(10, int(math.isqrt(args.samples)))
    report = verify_regularity(spec, n_space=n, n_time=n)
    config = {"kind": args.kind, "alpha": args.alpha, "d": args.d, "samples": args.samples}
    _emit(args, "curve-verify", config, report.to_dict())
    return 0


def cmd_data(args) -> int:
    if args.family == GAUSSIAN_LIKE:
        profile = gaussian_like()
    elif args.family == BOURGAIN:
        profile = bourgain_profile(args.R, d=args.d)
    else:
        profile = build_profile(args.family, args.R, args.epsilon, d=args.d)
    svals = [float(s) for s in args.s_values.split(",")] if args.s_values else [0.0]
    norms = {str(s): sobolev_norm(profile, s) for s in svals}
    config = {
        "family": args.family,
        "R": args.R,
        "epsilon": args.epsilon,
        "d": args.d,
        "s_values": svals,
    }
    result = {
        "support_box": [list(iv) for iv in profile.support_box],
        "sobolev_norms": norms,
    }
    _emit(args, "data-info", config, result)
    return 0


def cmd_eval(args) -> int:
    profile = (
        gaussian_like()
        if args.family == GAUSSIAN_LIKE
        else build_profile(args.family, args.R, args.epsilon, d=1)
    )
    curve = CurveSpec(_CURVES[args.curve], alpha=args.alpha, d=1)
    quad = _quad_from_args(args)
    sample = evaluate(profile, curve, args.m, args.x, args.t, quad)
    config = {
        "family": args.family,
        "R": args.R,
        "epsilon": args.epsilon,
        "curve": args.curve,
        "alpha": args.alpha,
        "m": args.m,
        "x": args.x,
        "t": args.t,
    }
    _emit(args, "eval", config, sample.to_dict())
    return 0


def cmd_maximal(args) -> int:
    family = args.family
    curve = CurveSpec(family_curve_kind(family), alpha=args.alpha, d=1)
    c = args.c if args.c is not None else calibrate_window_constant(family, args.alpha)
    R = args.R
    lo, hi = admissible_window(family, R, args.alpha, args.epsilon, c)
    xs = window_grid(lo, hi, args.x_points)
    quad = _quad_from_args(args)
    grid = TimeGrid(args.j_min, args.j_max, points_per_octave=args.points_per_octave)
    tc = None
    if args.inject_critical:
        tc = np.array(
            [critical_time(family, curve, R, args.epsilon, float(x), window_constant=c) for x in xs]
        )
    profile = build_profile(family, R, args.epsilon, d=1)
    fld = maximal_field(profile, curve, args.m, args.delta, xs, grid, quad, critical_times=tc)
    config = {
        "family": family,
        "R": R,
        "alpha": args.alpha,
        "m": args.m,
        "delta": args.delta,
        "x_points": args.x_points,
        "j_min": args.j_min,
        "j_max": args.j_max,
        "inject_critical": bool(args.inject_critical),
        "c": c,
    }
    _emit(args, "maximal", config, fld.to_dict())
    if args.csv:
        write_csv(
            args.csv,
            ["x", "sup_value", "argmax_t"],
            list(zip(fld.xs.tolist(), fld.sup_values.tolist(), fld.argmax_times.tolist())),
        )
    return 0


def cmd_lemma_check(args) -> int:
    regime = _LEMMA_REGIMES[args.lemma](args.d, args.alpha)
    bound = lemma_bound(regime, args.k, args.j)
    curve = CurveSpec(MINUS_SHIFT, alpha=regime.alpha if regime.smoothness == HOLDER else 1.0, d=1)
    quad = _quad_from_args(args)
    empirical = lemma_empirical(regime, args.k, args.j, curve, quad)
    config = {"lemma": args.lemma, "k": args.k, "j": args.j, "alpha": args.alpha, "d": args.d}
    result = {"empirical": empirical, "bound": bound, "ratio": empirical / bound}
    _emit(args, "lemma-check", config, result)
    return 0


def _plan_from_args(args) -> ExperimentPlan:
    if args.plan:
        import json

        with open(args.plan) as fh:
            data = json.load(fh)
        try:
            return ExperimentPlan.from_dict(data)
        except TypeError as exc:
            raise DomainValidationError(f"bad plan config: {exc}") from None
    Rs = tuple(float(2 ** j) for j in range(args.R_min_pow, args.R_max_pow + 1))
    return ExperimentPlan(
        family=args.family,
        alpha=args.alpha,
        delta=args.delta,
        s=args.s,
        epsilon=args.epsilon,
        R_sequence=Rs,
        c=args.c,
        workers=args.workers,
    )


def cmd_scaling(args) -> int:
    plan = _plan_from_args(args)
    report = run_experiment(plan)
    payload = report.to_dict()
    _emit(args, "scaling", plan.to_dict(), payload)
    base = args.out.rsplit(".", 1)[0] if args.out else None
    if base:
        rows = [
            (R, ratio, math.log2(R), math.log2(ratio))
            for R, ratio in report.samples
        ]
        write_csv(base + ".csv", ["R", "ratio", "log2R", "logratio"], rows)
        write_gnuplot(
            base + ".gp", os.path.basename(base) + ".csv",
            f"{plan.family} scaling", "log2 R", "log2 ratio",
        )
    return 0


def cmd_sweep(args) -> int:
    plan = _plan_from_args(args)
    s_list = [float(v) for v in args.s_list.split(",")]
    rows, crossing = sharpness_sweep(plan, s_list)
    config = plan.to_dict()
    config["s_list"] = s_list
    result = {
        "slopes": [[s, m] for s, m in rows],
        "crossing": crossing,
    }
    _emit(args, "sweep", config, result)
    return 0


def cmd_ceiling_demo(args) -> int:
    curve = CurveSpec(MINUS_SHIFT, alpha=args.alpha, d=1)
    profile = gaussian_like()
    quad = _quad_from_args(args)
    pairs, running = rate_ceiling_demo(profile, curve, quad, x_star=args.x_star)
    config = {"alpha": args.alpha, "x_star": args.x_star}
    result = {
        "pairs": [[t, r] for t, r in pairs],
        "running_infimum": running,
        "floor": running[-1],
    }
    _emit(args, "ceiling-demo", config, result)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curverate",
        description="Convergence-rate laboratory for Schrodinger evolution along curves.",
    )
    parser.add_argument("--version", action="version", version=f"curverate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", help="threshold tables and region curves")
    p.add_argument("mode", choices=["table", "region"])
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--alpha", type=str, default="1")
    p.add_argument("--m", type=str, default="2")
    p.add_argument("--smoothness", choices=[LIPSCHITZ, HOLDER], default=HOLDER)
    p.add_argument("--delta-min", type=str, default="0")
    p.add_argument("--delta-max", type=str, required=True)
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("curve", help="verify curve regularity")
    p.add_argument("mode", choices=["verify"])
    p.add_argument("--kind", choices=list(_CURVES), required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("data", help="initial-data info")
    p.add_argument("mode", choices=["info"])
    p.add_argument("--family", required=True)
    p.add_argument("--R", type=float, default=64.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--s-values", type=str, default="0")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_data)

    p = sub.add_parser("eval", help="evaluate the propagator at one point")
    p.add_argument("--family", required=True)
    p.add_argument("--R", type=float, default=64.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--curve", choices=list(_CURVES), default="straight")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    _add_quad_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("maximal", help="rate-weighted maximal field over a window")
    p.add_argument("--family", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--x-points", type=int, default=129)
    p.add_argument("--j-min", type=float, default=None)
    p.add_argument("--j-max", type=float, default=None)
    p.add_argument("--points-per-octave", type=int, default=8)
    p.add_argument("--inject-critical", action="store_true")
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--csv", type=str, default=None)
    _add_quad_args(p)
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("lemma-check", help="local maximal bound vs empirical value")
    p.add_argument("--lemma", type=int, choices=[1, 2, 3, 4], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--d", type=int, default=1)
    _add_quad_args(p)
    p.set_defaults(func=cmd_lemma_check)

    for name, fn in (("scaling", cmd_scaling), ("sweep", cmd_sweep)):
        p = sub.add_parser(name, help=f"{name} experiment")
        p.add_argument("--plan", type=str, default=None, help="JSON plan file")
        p.add_argument("--family", default=BUMP_MODULATED)
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--delta", type=float, default=0.0)
        p.add_argument("--s", type=float, default=0.0)
        p.add_argument("--epsilon", type=float, default=0.0)
        p.add_argument("--c", type=float, default=None)
        p.add_argument("--R-min-pow", type=int, default=5)
        p.add_argument("--R-max-pow", type=int, default=10)
        p.add_argument("--workers", type=int, default=_default_workers())
        if name == "sweep":
            p.add_argument("--s-list", type=str, required=True)
        p.add_argument("--out", type=str, default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("ceiling-demo", help="rate-ceiling rigidity demonstration")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--x-star", type=float, default=0.3)
    _add_quad_args(p)
    p.set_defaults(func=cmd_ceiling_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except AccuracyError as exc:
        sys.stderr.write(f"accuracy error: {exc}\n")
        return 2
    except (CurverateError, DomainValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
