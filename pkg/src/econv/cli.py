"""Command-line surface: conjugate / subdiff / dirderiv / dc-check / verify / repro.

Vectors parse either as semicolon-separated groups ("1 2;0 0;1" for a dual
triple in the plane) or as a flat comma list ("3,0,1"); reports are written
as deterministic JSON and summarized on the console.  Exit codes: 0 all
PASS or VACUOUS, 1 any FAIL, 2 any INCONCLUSIVE without FAIL, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import _kernels
from .conjugate import c_conjugate_argmax, c_prime_conjugate
from .dc import eps_directional_derivative
from .extreal import TolerancePolicy
from .grids import GridSpec
from .problem import Problem, ProblemFileError, load_problem
from .registry import REGISTRY, run_check
from .report import CheckRecord, Report, Verdict, encode_value, exit_code
from .repro import repro
from .spaces import DualTriple
from .subdiff import c_subdiff_descriptor

__all__ = ["main", "parse_vector", "parse_triple"]


def parse_vector(text: str, dim: int) -> np.ndarray:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    vals = [float(p) for p in parts]
    if len(vals) != dim:
        raise ValueError(f"expected {dim} coordinates, got {len(vals)}")
    return np.asarray(vals, dtype=float)


def parse_triple(text: str, dim: int) -> DualTriple:
    if ";" in text:
        groups = [g for g in text.split(";") if g.strip()]
        if len(groups) != 3:
            raise ValueError("a dual triple needs three ;-separated groups")
        xs = parse_vector(groups[0], dim)
        us = parse_vector(groups[1], dim)
        return DualTriple(xs, us, float(groups[2]))
    vals = [float(p) for p in text.split(",") if p.strip()]
    if len(vals) != 2 * dim + 1:
        raise ValueError(f"expected {2 * dim + 1} numbers for a dual triple, got {len(vals)}")
    return DualTriple(vals[:dim], vals[dim : 2 * dim], vals[-1])


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None,
                   help="override the problem tolerance with GRID mode at this eq-tol")
    p.add_argument("--budget", type=int, default=None, help="override the node budget")
    p.add_argument("--threads", type=int, default=None, help="kernel thread count (numba backend)")
    p.add_argument("--seed", type=int, default=None, help="default seed for sampled checks")


def _apply_common(problem: Problem, args) -> Problem:
    if args.tol is not None:
        problem.policy = TolerancePolicy.grid(eq_tol=args.tol)
    if args.budget is not None:
        problem.max_nodes = args.budget
    if args.threads is not None and _kernels.backend_name() == "numba":
        import numba

        numba.set_num_threads(max(1, args.threads))
    return problem


def _emit(payload: dict) -> None:
    print(json.dumps(encode_value(payload), indent=2, sort_keys=True))


def _finish(report: Report, out_path: str | None) -> int:
    for line in report.console_lines():
        print(line)
    if out_path:
        report.write(out_path)
        print(f"report written to {out_path}")
    return exit_code(report)


def _cmd_conjugate(args) -> int:
    problem = _apply_common(load_problem(args.problem), args)
    f = problem.function(args.function)
    if args.mode == "exact":
        problem.policy = TolerancePolicy.exact()
    elif args.mode == "grid" and problem.policy.is_exact:
        problem.policy = TolerancePolicy.grid(eq_tol=args.tol or 1e-6)
    ctx = problem.context(xgrid=problem.xgrid_for(args.function))
    w = parse_triple(args.at, problem.space_dim)
    val, arg = c_conjugate_argmax(f, w, ctx)
    _emit({
        "function": args.function,
        "at": w.as_array(),
        "mode": problem.policy.mode,
        "value": val,
        "argmax": arg,
        "backend": _kernels.backend_name(),
    })
    return 0


def _cmd_subdiff(args) -> int:
    problem = _apply_common(load_problem(args.problem), args)
    f = problem.function(args.function)
    ctx = problem.context()
    x0 = parse_vector(args.point, problem.space_dim)
    desc = c_subdiff_descriptor(f, x0, args.eps, ctx)
    payload = {
        "function": args.function,
        "point": x0,
        "eps": args.eps,
        "empty": desc.empty,
        "mode": problem.policy.mode,
    }
    if args.extract_interval:
        if problem.space_dim != 1:
            raise ProblemFileError("subdiff", "--extract-interval needs a one-dimensional space")
        payload["interval"] = None if desc.empty else list(desc.interval())
    if args.at:
        w = parse_triple(args.at, problem.space_dim)
        payload["member"] = desc.member(w)
        payload["at"] = w.as_array()
    _emit(payload)
    return 0


def _cmd_dirderiv(args) -> int:
    problem = _apply_common(load_problem(args.problem), args)
    f = problem.function(args.function)
    ctx = problem.context()
    x0 = parse_vector(args.point, problem.space_dim)
    u = parse_vector(args.dir, problem.space_dim)
    val = eps_directional_derivative(f, x0, u, args.eps, ctx)
    _emit({"function": args.function, "point": x0, "dir": u, "eps": args.eps, "value": val})
    return 0


def _cmd_dc_check(args) -> int:
    problem = _apply_common(load_problem(args.problem), args)
    if problem.dc is None:
        raise ProblemFileError("dc", "the problem file declares no dc section")
    seed = args.seed if args.seed is not None else 0
    eps_grid = [float(v) for v in args.eps_grid.split(",") if v.strip()]
    lam_grid = [float(v) for v in args.lambda_grid.split(",") if v.strip()]
    report = Report(input_hash=problem.input_hash)
    checks = [{"check_id": "cor-global-necessary", "point": parse_vector(args.point, problem.space_dim),
               "eps_grid": eps_grid, "seed": seed, "samples": args.samples}]
    for eps in eps_grid:
        checks.append({"check_id": "eps-minimizer", "point": parse_vector(args.point, problem.space_dim),
                       "eps": eps, "seed": seed})
        checks.append({"check_id": "cor-eps-necessary", "point": parse_vector(args.point, problem.space_dim),
                       "eps": eps, "lambda_grid": lam_grid, "seed": seed, "samples": args.samples})
    for check in checks:
        report.add(run_check(problem, check))
    return _finish(report, args.out)


def _cmd_verify(args) -> int:
    problem = _apply_common(load_problem(args.problem), args)
    only = set(args.only.split(",")) if args.only else None
    report = Report(input_hash=problem.input_hash)
    ran = 0
    for check in problem.checks:
        if only is not None and check["check_id"] not in only:
            continue
        if args.seed is not None:
            check = dict(check)
            check.setdefault("seed", args.seed)
        report.add(run_check(problem, check))
        ran += 1
    if only is not None and not ran:
        raise ProblemFileError("checks", "--only matched no declared check")
    return _finish(report, args.out)


def _cmd_repro(args) -> int:
    which = ("2", "4", "5") if args.example == "all" else (args.example,)
    report = repro(which)
    print(f"{'check':<28} {'statement':<72} verdict")
    for rec in report.records:
        print(f"{rec.check_id:<28} {rec.statement[:70]:<72} {rec.verdict.status}")
    if args.out:
        report.write(args.out)
        print(f"report written to {args.out}")
    return exit_code(report)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="econv",
        description="Evenly convex analysis toolkit: conjugates, subdifferentials, DC checks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conjugate", help="evaluate a coupling conjugate at a dual triple")
    p.add_argument("--problem", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--at", required=True, help='dual triple, e.g. "3,0,1" or "1 2;0 0;1"')
    p.add_argument("--mode", choices=("exact", "grid"), default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_conjugate)

    p = sub.add_parser("subdiff", help="describe an eps-subdifferential at a point")
    p.add_argument("--problem", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--extract-interval", action="store_true")
    p.add_argument("--at", default=None, help="optional dual triple for a membership test")
    _common_flags(p)
    p.set_defaults(func=_cmd_subdiff)

    p = sub.add_parser("dirderiv", help="evaluate an eps-directional derivative")
    p.add_argument("--problem", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--eps", type=float, default=0.0)
    _common_flags(p)
    p.set_defaults(func=_cmd_dirderiv)

    p = sub.add_parser("dc-check", help="run the DC optimality battery at a point")
    p.add_argument("--problem", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--eps-grid", default="0,0.5,1")
    p.add_argument("--lambda-grid", default="0,0.1,1")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--out", default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_dc_check)

    p = sub.add_parser("verify", help="run the checks declared in a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--only", default=None, help="comma-separated check ids")
    p.add_argument("--out", default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("repro", help="run the fixed reproduction corpus")
    p.add_argument("--example", choices=("2", "4", "5", "all"), default="all")
    p.add_argument("--out", default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_repro)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemFileError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
