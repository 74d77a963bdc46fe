"""Command line front end.

Subcommands: classify, solve, picard, dynamics (equilibrium / stability /
flow), sweep, verify.  Structured results go to stdout as JSON; tables go
to CSV files with full-precision (17 significant digit) columns.

Exit codes: 0 success, 1 a sweep cell or verify suite disagreed, 2 bad
input (usage, malformed config or sweep spec), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import asdict
from multiprocessing import Pool

import numpy as np

from . import asymptotics, dynamics, io, picard, radial, verify
from .config import ExponentConfig, classify, config_from_dict, derived, validate
from .errors import (
    DegenerateStateError,
    DomainError,
    InsufficientRangeError,
    NoConvergenceError,
    NotABlowupError,
    PreconditionError,
)

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_EXPONENT_NAMES = ("N", "k", "m", "p", "q", "s")


def _add_exponent_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="JSON file with keys N, k, m, p, q, s (flags override)")
    parser.add_argument("--N", type=int, help="dimension")
    parser.add_argument("--k", type=int, help="Hessian order")
    parser.add_argument("--m", type=float, help="gradient exponent, first equation")
    parser.add_argument("--p", type=float, help="coupling exponent, first equation")
    parser.add_argument("--q", type=float, help="gradient exponent, second equation")
    parser.add_argument("--s", type=float, help="self exponent, second equation")


def _config_from_args(args) -> ExponentConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise DomainError("config file must hold a JSON object")
        data.update(loaded)
    for name in _EXPONENT_NAMES:
        val = getattr(args, name)
        if val is not None:
            data[name] = val
    return config_from_dict(data)


def cmd_classify(args) -> int:
    cfg = _config_from_args(args)
    regime = classify(cfg)
    out = {
        "config": cfg.as_dict(),
        "regime": regime.tag,
        "witness": regime.witness,
        "derived": asdict(derived(cfg)),
    }
    io.dump_json(out, sys.stdout)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _config_from_args(args)
    opts = radial.IntegrateOptions(
        rtol=args.rtol, atol=args.atol,
        blowup_threshold=args.blowup_threshold, r0=args.r0,
    )
    traj = radial.integrate(cfg, args.a, args.b, args.r_max, opts)
    if args.csv:
        io.write_trajectory_csv(traj, args.csv)

    last = traj.state(len(traj) - 1)
    summary = {
        "config": cfg.as_dict(),
        "regime": classify(cfg).tag,
        "a": args.a,
        "b": args.b,
        "r0": traj.r0,
        "startup_error": traj.startup_error,
        "terminal": asdict(traj.terminal),
        "samples": len(traj),
        "clamp_events": traj.clamp_events,
        "final_state": asdict(last),
        "blowup": None,
        "far_field": None,
        "estimate_violations": None,
    }
    if traj.terminal.kind in (radial.BLOWUP_DETECTED, radial.STEP_UNDERFLOW):
        try:
            summary["blowup"] = asdict(radial.estimate_blowup_rate(cfg, traj))
        except (NotABlowupError, PreconditionError) as exc:
            summary["blowup"] = {"error": str(exc)}
    if traj.terminal.kind == radial.REACHED_RMAX:
        try:
            summary["far_field"] = asdict(asymptotics.convergence_report(cfg, traj))
        except (PreconditionError, InsufficientRangeError):
            pass
    if args.ratios_csv:
        r, ru, rv = asymptotics.ratio_arrays(cfg, traj)
        io.write_ratio_csv(r, ru, rv, args.ratios_csv)
    if args.audit:
        bad = radial.check_estimates(cfg, traj)
        summary["estimate_violations"] = [asdict(x) for x in bad[:10]]
        summary["estimate_violation_count"] = len(bad)
    io.dump_json(summary, sys.stdout)
    return EXIT_OK


def cmd_picard(args) -> int:
    cfg = _config_from_args(args)
    if args.auto:
        result, rho = picard.picard_solve_auto(cfg, args.a, args.b, args.rho,
                                               M=args.grid, tol=args.tol,
                                               max_iter=args.max_iter)
    else:
        result = picard.picard_solve(cfg, args.a, args.b, args.rho,
                                     M=args.grid, tol=args.tol, max_iter=args.max_iter)
        rho = args.rho
    if args.csv:
        io.write_picard_csv(result.pair, args.csv)
    io.dump_json({
        "config": cfg.as_dict(),
        "rho": rho,
        "iterations": result.iterations,
        "change": result.change,
        "grid_points": len(result.pair.grid),
        "u_at_rho": float(result.pair.u_vals[-1]),
        "v_at_rho": float(result.pair.v_vals[-1]),
    }, sys.stdout)
    return EXIT_OK


def cmd_dyn_equilibrium(args) -> int:
    cfg = _config_from_args(args)
    out = {"config": cfg.as_dict(), "interior": None,
           "boundary": [asdict(b) for b in dynamics.boundary_equilibria(cfg)]}
    try:
        out["interior"] = asdict(dynamics.equilibrium(cfg))
    except PreconditionError as exc:
        out["interior"] = {"error": str(exc)}
    io.dump_json(out, sys.stdout)
    return EXIT_OK


def cmd_dyn_stability(args) -> int:
    cfg = _config_from_args(args)
    rep = dynamics.stability(cfg)
    out = {"config": cfg.as_dict(), "equilibrium": asdict(dynamics.equilibrium(cfg))}
    out.update(asdict(rep))
    io.dump_json(out, sys.stdout)
    return EXIT_OK


def cmd_dyn_flow(args) -> int:
    cfg = _config_from_args(args)
    eq = dynamics.equilibrium(cfg)
    if args.start is not None:
        try:
            Y0, Z0, W0 = (float(x) for x in args.start.split(","))
        except ValueError:
            raise DomainError(f"--start must be 'Y,Z,W', got {args.start!r}")
    else:
        Y0, Z0, W0 = args.start_scale * eq.Y_inf, eq.Z_inf, eq.W_inf
    states = dynamics.flow_integrate(
        cfg, dynamics.DynState(0.0, float("nan"), Y0, Z0, W0), args.t_end
    )
    if args.csv:
        io.write_dyn_csv(states, args.csv)
    last = states[-1]
    dist = max(abs(last.Y - eq.Y_inf), abs(last.Z - eq.Z_inf), abs(last.W - eq.W_inf))
    io.dump_json({
        "config": cfg.as_dict(),
        "start": {"Y": Y0, "Z": Z0, "W": W0},
        "t_end": last.t,
        "steps": len(states) - 1,
        "final": asdict(last),
        "equilibrium": asdict(eq),
        "distance_to_equilibrium": dist,
    }, sys.stdout)
    return EXIT_OK


def _axis_values(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(x) for x in spec]
    if isinstance(spec, dict):
        missing = {"start", "stop", "count"} - set(spec)
        if missing:
            raise DomainError(f"grid axis object is missing {sorted(missing)}")
        return [float(x) for x in np.linspace(spec["start"], spec["stop"], int(spec["count"]))]
    return [float(spec)]


def observed_behavior(cfg, traj) -> tuple[str, dict]:
    """Label what an integration actually did, for comparison with classify.

    Growth versus finite-radius asymptote is read off v's log-derivative
    Y = r v'/v at the last sample: along a power law Y stays near the
    exponent (even when the magnitude cap stopped the run), while an
    asymptote sends Y to infinity.  For asymptotes the fitted u' rate
    decides whether u stays finite.  States between the two Y cutoffs,
    and completed runs parked against an asymptote just past r_max, are
    reported as Ambiguous rather than guessed.
    """
    detail: dict = {"terminal": traj.terminal.kind}
    Y_last = float(traj.r[-1] * traj.dv[-1] / traj.v[-1])
    detail["Y_last"] = Y_last
    if Y_last < 1e3:
        return "Bounded", detail
    if Y_last <= 1e4 or traj.terminal.kind != radial.BLOWUP_DETECTED:
        return "Ambiguous", detail
    rep = radial.estimate_blowup_rate(cfg, traj)
    detail["u_finite"] = rep.u_finite
    detail["R_max"] = rep.R_max
    return ("UFiniteVBlowup" if rep.u_finite else "BothBlowup"), detail


def _sweep_cell(cell) -> dict:
    values, run = cell
    row = dict(values)
    row["extended"] = False
    try:
        cfg = validate(**values)
    except DomainError as exc:
        row.update(status="invalid", reason=str(exc), predicted="", observed="",
                   agree="", delta="", sigma="")
        return row
    der = derived(cfg)
    regime = classify(cfg)
    row.update(status="ok", reason="", predicted=regime.tag,
               delta=cfg.delta, sigma=der.sigma)
    if cfg.k <= cfg.m:
        # No local solution exists to integrate; the prediction is vacuous.
        row.update(observed="NoLocalSolution", agree=regime.tag == "NoSolution")
        return row
    a = run.get("a", 1.0)
    b = run.get("b", 1.0)
    opts = radial.IntegrateOptions(
        rtol=run.get("rtol", 1e-9),
        atol=run.get("atol", 1e-12),
        blowup_threshold=run.get("blowup_threshold", 1e12),
    )
    try:
        traj = radial.integrate(cfg, a, b, run.get("r_max", 1e3), opts)
        observed, detail = observed_behavior(cfg, traj)
        predicted_asymptote = regime.tag in ("BothBlowup", "UFiniteVBlowup")
        if observed == "Ambiguous" or (observed == "Bounded" and predicted_asymptote):
            # The asymptote (if any) sits at or beyond the swept range.
            # One rerun with the range pushed out and the cap lifted; the
            # Y gate in observed_behavior still decides the label.
            row["extended"] = True
            opts_ext = radial.IntegrateOptions(
                rtol=opts.rtol, atol=opts.atol, blowup_threshold=1e100)
            traj = radial.integrate(cfg, a, b, 1e9 * float(traj.r[-1]), opts_ext)
            observed, detail = observed_behavior(cfg, traj)
            if observed == "Bounded" and predicted_asymptote:
                hint = radial.blowup_radius_estimate(cfg, traj.state(len(traj) - 1))
                if hint > float(traj.r[-1]):
                    row.update(
                        observed="Bounded", agree="",
                        reason="no asymptote out to r=%.3g; local estimate %.3g"
                               % (traj.r[-1], hint),
                    )
                    return row
    except (PreconditionError, NotABlowupError, DegenerateStateError,
            NoConvergenceError, FloatingPointError) as exc:
        row.update(status="error", reason=str(exc), observed="", agree="")
        return row
    row.update(observed=observed,
               agree=(observed == regime.tag) if observed != "Ambiguous" else "")
    return row


_SWEEP_COLUMNS = ("N", "k", "m", "p", "q", "s", "delta", "sigma",
                  "predicted", "observed", "agree", "extended", "status", "reason")


def cmd_sweep(args) -> int:
    with open(args.spec) as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict) or "grid" not in spec:
        raise DomainError("sweep spec must be a JSON object with a 'grid' key")
    grid = spec["grid"]
    unknown = set(grid) - set(_EXPONENT_NAMES)
    if unknown:
        raise DomainError(f"unknown grid axes {sorted(unknown)}")
    axes = {name: _axis_values(grid[name]) if name in grid else None
            for name in _EXPONENT_NAMES}
    missing = [name for name, vals in axes.items() if vals is None]
    if missing:
        raise DomainError(f"sweep grid is missing axes {missing}")
    run = spec.get("run", {})
    cells = [
        ({"N": int(N), "k": int(k), "m": m, "p": p, "q": q, "s": s}, run)
        for N, k, m, p, q, s in itertools.product(*(axes[n] for n in _EXPONENT_NAMES))
    ]

    jobs = args.jobs or spec.get("jobs") or int(os.environ.get("KHESSIAN_JOBS", "0")) \
        or (os.cpu_count() or 1)
    if jobs > 1 and len(cells) > 1:
        with Pool(processes=min(jobs, len(cells))) as pool:
            rows = pool.map(_sweep_cell, cells)
    else:
        rows = [_sweep_cell(cell) for cell in cells]
    rows.sort(key=lambda row: tuple(float(row[n]) for n in _EXPONENT_NAMES))

    with open(args.out, "w") as fh:
        fh.write(",".join(_SWEEP_COLUMNS) + "\n")
        for row in rows:
            rendered = []
            for col in _SWEEP_COLUMNS:
                val = row.get(col, "")
                if isinstance(val, bool):
                    rendered.append(str(val).lower())
                elif isinstance(val, float):
                    rendered.append(io.fmt(val))
                else:
                    rendered.append(str(val).replace(",", ";"))
            fh.write(",".join(rendered) + "\n")

    n_disagree = sum(1 for row in rows if row.get("agree") is False)
    n_error = sum(1 for row in rows if row.get("status") == "error")
    n_ambiguous = sum(1 for row in rows if row.get("observed") == "Ambiguous")
    io.dump_json({
        "cells": len(rows),
        "disagreements": n_disagree,
        "errors": n_error,
        "ambiguous": n_ambiguous,
        "invalid": sum(1 for row in rows if row.get("status") == "invalid"),
        "out": args.out,
    }, sys.stdout)
    if n_disagree:
        return EXIT_DISAGREE
    if n_error:
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or sorted(verify.SUITES)
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise DomainError(f"unknown suites {unknown}; available: {sorted(verify.SUITES)}")
    failed = False
    for name in names:
        result = verify.SUITES[name]()
        status = "PASS" if result.passed else "FAIL"
        print(f"{name}: {status} ({result.checks - result.failures}/{result.checks} checks)")
        for note in result.notes:
            print(f"  - {note}")
        failed = failed or not result.passed
    return EXIT_DISAGREE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="khessian",
        description="Radial solutions of a coupled k-Hessian system: "
                    "classification, integration, dynamics, asymptotics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="predict the solution regime of a configuration")
    _add_exponent_args(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_solve = sub.add_parser("solve", help="integrate the radial problem outward")
    _add_exponent_args(p_solve)
    p_solve.add_argument("--a", type=float, default=1.0, help="u(0) (default 1)")
    p_solve.add_argument("--b", type=float, default=1.0, help="v(0) (default 1)")
    p_solve.add_argument("--r-max", type=float, required=True, help="target radius")
    p_solve.add_argument("--rtol", type=float, default=1e-9)
    p_solve.add_argument("--atol", type=float, default=1e-12)
    p_solve.add_argument("--r0", type=float, default=None, help="startup radius override")
    p_solve.add_argument("--blowup-threshold", type=float, default=1e12)
    p_solve.add_argument("--csv", metavar="PATH", help="write trajectory samples")
    p_solve.add_argument("--ratios-csv", metavar="PATH",
                         help="write u, v divided by the predicted power law")
    p_solve.add_argument("--audit", action="store_true",
                         help="also run the inequality audit on the samples")
    p_solve.set_defaults(func=cmd_solve)

    p_pic = sub.add_parser("picard", help="small-ball fixed point iteration")
    _add_exponent_args(p_pic)
    p_pic.add_argument("--a", type=float, default=1.0)
    p_pic.add_argument("--b", type=float, default=1.0)
    p_pic.add_argument("--rho", type=float, required=True, help="ball radius")
    p_pic.add_argument("--grid", type=int, default=512, help="grid points (default 512)")
    p_pic.add_argument("--tol", type=float, default=1e-10)
    p_pic.add_argument("--max-iter", type=int, default=200)
    p_pic.add_argument("--auto", action="store_true",
                       help="halve rho until the iteration contracts")
    p_pic.add_argument("--csv", metavar="PATH", help="write the fixed point samples")
    p_pic.set_defaults(func=cmd_picard)

    p_dyn = sub.add_parser("dynamics", help="logarithmic-coordinate flow tools")
    dyn_sub = p_dyn.add_subparsers(dest="dyn_command", required=True)

    p_eq = dyn_sub.add_parser("equilibrium", help="interior and boundary rest points")
    _add_exponent_args(p_eq)
    p_eq.set_defaults(func=cmd_dyn_equilibrium)

    p_st = dyn_sub.add_parser("stability", help="spectrum at the interior rest point")
    _add_exponent_args(p_st)
    p_st.set_defaults(func=cmd_dyn_stability)

    p_fl = dyn_sub.add_parser("flow", help="integrate the reduced (Y, Z, W) flow")
    _add_exponent_args(p_fl)
    p_fl.add_argument("--start", metavar="Y,Z,W", help="start state (default: scaled equilibrium)")
    p_fl.add_argument("--start-scale", type=float, default=0.5,
                      help="scale on the equilibrium Y for the default start (default 0.5)")
    p_fl.add_argument("--t-end", type=float, default=200.0, help="duration in t = log r")
    p_fl.add_argument("--csv", metavar="PATH", help="write flow samples")
    p_fl.set_defaults(func=cmd_dyn_flow)

    p_sw = sub.add_parser("sweep", help="classify and integrate a grid of configurations")
    p_sw.add_argument("--spec", required=True, metavar="PATH",
                      help="JSON: {'grid': {axis: list|{start,stop,count}}, 'run': {...}}")
    p_sw.add_argument("--out", required=True, metavar="PATH", help="CSV output path")
    p_sw.add_argument("--jobs", type=int, default=0,
                      help="worker processes (default: KHESSIAN_JOBS or cpu count)")
    p_sw.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the built-in verification suites")
    p_ver.add_argument("suite", nargs="*", help=f"suites to run (default all): "
                       f"{', '.join(sorted(verify.SUITES))}")
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (DomainError, PreconditionError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergenceError, NotABlowupError, InsufficientRangeError,
            DegenerateStateError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
