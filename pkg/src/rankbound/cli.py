"""Command line entry point: ``rankbound certify|solve|penalty-check|project``.

stdout carries one JSON document; logs go to stderr (level from the
RANKBOUND_LOG environment variable).  Exit codes: 2 bad input, 3 projection
failure, 4 solver failure, 5 instance too large for the oracle.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bounds, mscr, spectral
from .errors import (ConvergenceFailure, InvalidInput, MissingConstant, NumericalFailure,
                     Unsupported)
from .oracle import OracleConfig, brute_min_feasible, brute_min_penalty
from .problem import load_point, load_problem
from .sets import matrix_to_dict, project
from .witness import local_feasibility_certificate

log = logging.getLogger("rankbound")

EXIT_INPUT, EXIT_PROJECTION, EXIT_SOLVER, EXIT_UNSUPPORTED = 2, 3, 4, 5
PENALTY_GAP_TOL = 5e-3


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(obj):
    # JSON has no NaN/inf
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def emit(doc) -> None:
    sys.stdout.write(json.dumps(_clean(doc), default=_json_default, allow_nan=False) + "\n")


def cmd_certify(args) -> int:
    prob = load_problem(args.problem)
    X = prob.set.check_shape(load_point(args.point))
    xstar = load_point(args.xstar) if args.xstar else None
    cert = local_feasibility_certificate(X, prob.kappa, prob.set)
    reports = {
        "feasible_local": bounds.bound_feasible_local(X, prob.kappa, prob.set).to_dict(),
        "feasible_global": bounds.bound_feasible_global(X, prob.kappa, prob.set).to_dict(),
    }
    for name, fn in (("solution_local", bounds.bound_solution_local),
                     ("solution_global", bounds.bound_solution_global)):
        try:
            reports[name] = fn(X, prob.kappa, prob.set, prob.objective, xstar).to_dict()
        except MissingConstant as e:
            reports[name] = {"unavailable": str(e)}
    emit({"certificate": cert.to_dict(), "bounds": reports,
          "tail": spectral.tail_sum(X, prob.kappa)})
    return 0


def _config(prob, args, seed=None, x0=None):
    sv = prob.solver
    rho0 = args.rho0 if args.rho0 is not None else sv.get("rho0", "auto")
    tol = sv.get("tol", 1e-8)
    return mscr.MscrConfig(
        objective=prob.objective, set=prob.set, kappa=prob.kappa, rho0=rho0,
        tau_schedule=sv.get("tau", 1.0), max_stages=sv.get("max_stages", 50),
        feas_tol=tol, obj_tol=tol, sub_tol=tol,
        x0=x0 or sv.get("x0", "auto"),
        seed=seed if seed is not None else (args.seed if args.seed is not None else sv.get("seed", 0)),
        record_time=args.wall_clock)


def _run_one(cfg):
    return mscr.run(cfg)


def _write_trace(trace, path):
    Path(path).write_text(trace.to_csv())


def cmd_solve(args) -> int:
    prob = load_problem(args.problem)
    if args.sweep:
        base = _config(prob, args).seed
        cfgs = [_config(prob, args, seed=base + i, x0="random") for i in range(args.sweep)]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            traces = list(pool.map(_run_one, cfgs))
        out = []
        for i, (cfg, tr) in enumerate(zip(cfgs, traces)):
            if args.trace:
                p = Path(args.trace)
                _write_trace(tr, p.with_name(f"{p.stem}_{i}{p.suffix}"))
            out.append({"seed": cfg.seed, **tr.summary()})
        emit({"runs": out})
        return 0
    try:
        trace = mscr.run(_config(prob, args))
    except NumericalFailure as e:
        if args.trace and getattr(e, "trace", None) is not None:
            _write_trace(e.trace, args.trace)
        raise
    if args.trace:
        _write_trace(trace, args.trace)
    if args.trace_json:
        Path(args.trace_json).write_text(trace.to_json())
    emit(trace.summary())
    return 0


def cmd_penalty_check(args) -> int:
    prob = load_problem(args.problem)
    cfg = OracleConfig(prob.set, prob.kappa, grid_density=args.grid)
    threshold = mscr.exact_penalty_threshold(prob.objective, prob.set, prob.kappa)
    rho = args.rho_factor * threshold
    _, fmin = brute_min_feasible(prob.objective, cfg)
    P, pmin = brute_min_penalty(prob.objective, rho, cfg)
    gap = abs(pmin - fmin)
    tail = spectral.tail_sum(P, prob.kappa)
    emit({"threshold": threshold, "rho": rho, "feasible_min": fmin, "penalty_min": pmin,
          "gap": gap, "penalty_minimizer": matrix_to_dict(P), "penalty_minimizer_tail": tail,
          "pass": bool(gap <= PENALTY_GAP_TOL and tail <= PENALTY_GAP_TOL)})
    return 0


def cmd_project(args) -> int:
    prob = load_problem(args.problem)
    emit(project(load_point(args.point), prob.set).to_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="witness and error-bound report for a point")
    p.add_argument("--problem", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--xstar", help="point file standing in for a solution (diagnostic bounds)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("solve", help="run the multi-stage convex relaxation")
    p.add_argument("--problem", required=True)
    p.add_argument("--trace", help="CSV trace output path")
    p.add_argument("--trace-json", help="JSON trace output path")
    p.add_argument("--rho0", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--sweep", type=int, default=0, help="independent runs from random starts")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--wall-clock", action="store_true",
                   help="fill the wall_ms column (makes traces run-dependent)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("penalty-check", help="oracle comparison of penalty and constrained minima")
    p.add_argument("--problem", required=True)
    p.add_argument("--rho-factor", type=float, default=1.1,
                   help="rho as a multiple of the exact-penalty threshold")
    p.add_argument("--grid", type=int, default=200)
    p.set_defaults(func=cmd_penalty_check)

    p = sub.add_parser("project", help="project a point onto Omega")
    p.add_argument("--problem", required=True)
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_project)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr,
                        level=os.environ.get("RANKBOUND_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, MissingConstant, OSError) as e:
        log.error("%s", e)
        return EXIT_INPUT
    except ConvergenceFailure as e:
        log.error("%s", e)
        return EXIT_PROJECTION
    except NumericalFailure as e:
        log.error("%s", e)
        return EXIT_SOLVER
    except Unsupported as e:
        log.error("%s", e)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
