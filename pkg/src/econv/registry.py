"""Registry of named checks: each entry resolves problem-file inputs,
drives the corresponding operation, and emits one report record."""

from __future__ import annotations

import time

import numpy as np

from .conjugate import (
    ConjugateOf,
    biconjugate_many,
    c_conjugate,
    eprime_convexity_check,
)
from .dc import (
    DEFAULT_EPS_GRID,
    DEFAULT_LAMBDAS,
    check_derivative_lower_bound,
    check_dc_subdiff_inclusion,
    check_eps_necessary,
    check_global_necessary,
    check_derivative_set_identity,
    eps_directional_derivative,
    is_eps_minimizer,
)
from .extreal import INF, add_conj
from .functions import FunctionModel
from .problem import Problem, ProblemFileError
from .report import FAIL, PASS, VACUOUS, CheckRecord, Verdict
from .sets import FlaggedConvexSet, strictly_separates
from .spaces import DualTriple, coupling_c
from .subdiff import (
    c_eps_subdiff_member,
    c_subdiff_descriptor,
    check_conjugate_flip,
    check_subdiff_in_domfc,
    check_sum_rule,
    envelope_reconstruct,
    fenchel_eps_subdiff_member,
    v_cone_member,
)

__all__ = ["REGISTRY", "run_check", "registry_ids"]


def _rng(params: dict) -> np.random.Generator:
    return np.random.default_rng(int(params.get("seed", 0)))


def _triples(rng, dim: int, k: int, scale: float = 3.0) -> list:
    out = []
    for _ in range(k):
        xs = scale * rng.standard_normal(dim)
        us = scale * rng.standard_normal(dim)
        a = scale * rng.standard_normal()
        out.append(DualTriple(xs, us, float(a)))
    return out


def _param_triples(problem: Problem, params: dict, key: str = "triples"):
    if key in params:
        return [DualTriple.from_array(np.asarray(t, dtype=float), problem.space_dim) for t in params[key]]
    rng = _rng(params)
    return _triples(rng, problem.space_dim, int(params.get("samples", 100)))


def _fn(problem: Problem, params: dict, key: str = "function") -> FunctionModel:
    return problem.function(params[key])


def _point(params: dict, key: str = "point"):
    return np.asarray(params[key], dtype=float)


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------


def _run_separation(problem: Problem, params: dict) -> Verdict:
    cset = FlaggedConvexSet.from_json(params["set"])
    directions = []
    for pt in params["points"]:
        d = strictly_separates(cset, np.asarray(pt, dtype=float), problem.policy)
        inside = bool(params.get("expect_inside", False))
        if d is None and not inside:
            return Verdict(FAIL, "no separator for an outside point", [pt])
        directions.append(None if d is None else list(map(float, d)))
    return Verdict(PASS, "strict separators certified", values={"directions": directions})


def _run_biconjugate(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context(xgrid=problem.xgrid_for(params["function"]))
    pts = np.asarray(params["points"], dtype=float).reshape(-1, f.dim)
    tol = float(params.get("tol", 1e-2))
    clearance = float(params.get("boundary_clearance", 0.0))
    bic = biconjugate_many(f, pts, ctx)
    fv = f.evaluate_many(pts, ctx.policy)
    over = bic > fv + 1e-12
    if np.any(over):
        i = int(np.argmax(over))
        return Verdict(FAIL, "the envelope exceeded the function", [pts[i]],
                       {"envelope": bic[i], "value": fv[i]})
    interior = np.ones(len(pts), dtype=bool)
    if clearance > 0:
        interior = np.array([f.dom_member(p) and _clearance_ok(f, p, clearance) for p in pts])
    both = interior & np.isfinite(fv)
    gap = np.abs(np.where(both, bic - fv, 0.0))
    worst = float(gap.max()) if len(gap) else 0.0
    if worst > tol:
        i = int(np.argmax(gap))
        return Verdict(FAIL, "envelope differs from an evenly convex model", [pts[i]],
                       {"gap": worst})
    return Verdict(PASS, "envelope minorizes everywhere and matches on the interior",
                   values={"max_gap": worst, "points": int(len(pts))})


def _clearance_ok(f: FunctionModel, p, clearance: float) -> bool:
    dom = f.domain()
    for h in dom.halfspaces:
        if h.is_degenerate():
            continue
        val = float(np.dot(h.normal, p))
        nrm = float(np.linalg.norm(h.normal))
        if (h.level - val) / nrm < clearance:
            return False
    return True


def _run_eprime(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    samples = _param_triples(problem, params)
    return eprime_convexity_check(ConjugateOf(f), samples, ctx)


def _run_subgradient_equivalence(problem: Problem, params: dict) -> Verdict:
    """Conjugate-equality membership against the defining inequality on a grid."""
    f = _fn(problem, params)
    ctx = problem.context(xgrid=problem.xgrid_for(params["function"]))
    x0 = _point(params)
    eps = float(params.get("eps", 0.0))
    grid = ctx.x_grid_for(f)
    pts = grid.points()
    fv = f.evaluate_many(pts, ctx.policy)
    fx0 = f.evaluate(x0, ctx.policy)
    tol = ctx.membership_slack(closed_form=False)
    checked = 0
    for w in _param_triples(problem, params):
        by_conjugate = c_eps_subdiff_member(f, x0, w, eps, ctx)
        by_definition = _defining_inequality(f, x0, fx0, w, eps, pts, fv, ctx, tol)
        if by_conjugate != by_definition:
            return Verdict(FAIL, "characterization disagrees with the defining inequality",
                           [w], {"conjugate_route": by_conjugate, "definition_route": by_definition})
        checked += 1
    return Verdict(PASS, "both membership routes agree", values={"triples": checked},
                   label="sampling-based")


def _defining_inequality(f, x0, fx0, w, eps, pts, fv, ctx, tol) -> bool:
    import math

    if not math.isfinite(fx0):
        return False
    if not ctx.policy.lt(float(np.dot(x0, w.ustar)), w.alpha):
        return False
    c0 = coupling_c(x0, w, ctx.policy)
    gates = pts @ w.ustar
    cvals = np.where(gates < w.alpha, pts @ w.xstar, INF)
    lhs = np.where(np.isposinf(fv), INF, fv) - fx0
    rhs = np.where(np.isposinf(cvals), np.where(np.isposinf(fv), -INF, INF), cvals - c0) - eps
    return bool(np.all(lhs >= rhs - tol))


def _run_product_form(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    x0 = _point(params)
    eps = float(params.get("eps", 0.0))
    checked = 0
    for w in _param_triples(problem, params):
        joint = c_eps_subdiff_member(f, x0, w, eps, ctx)
        split = fenchel_eps_subdiff_member(f, x0, w.xstar, eps, ctx) and v_cone_member(
            f.domain(), w.ustar, w.alpha, ctx.policy
        ) and bool(f.dom_extra_points() == () or _extras_inside(f, w, ctx))
        if joint != split:
            return Verdict(FAIL, "product factorization broke", [w],
                           {"joint": joint, "split": split})
        checked += 1
    return Verdict(PASS, "membership equals the product of its factors",
                   values={"triples": checked})


def _extras_inside(f: FunctionModel, w: DualTriple, ctx) -> bool:
    return all(ctx.policy.lt(float(np.dot(p, w.ustar)), w.alpha) for p in f.dom_extra_points())


def _run_monotonicity(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    x0 = _point(params)
    rng = _rng(params)
    pairs = params.get("eps_pairs") or [[0.0, 0.5], [0.5, 1.0], [0.0, 2.0]]
    checked = 0
    for w in _param_triples(problem, params):
        e1, e2 = pairs[checked % len(pairs)]
        lo, hi = (float(e1), float(e2)) if e1 <= e2 else (float(e2), float(e1))
        if c_eps_subdiff_member(f, x0, w, lo, ctx) and not c_eps_subdiff_member(f, x0, w, hi, ctx):
            return Verdict(FAIL, "membership lost as the slack grew", [w], {"eps": [lo, hi]})
        checked += 1
    return Verdict(PASS, "memberships grow with the slack", values={"triples": checked})


def _run_nested_intersection(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    x0 = _point(params)
    eps = float(params.get("eps", 0.5))
    etas = [eps + 10.0 ** (-k) for k in range(1, 7)]
    checked = 0
    for w in _param_triples(problem, params):
        at_eps = c_eps_subdiff_member(f, x0, w, eps, ctx)
        above = all(c_eps_subdiff_member(f, x0, w, eta, ctx) for eta in etas)
        if at_eps and not above:
            return Verdict(FAIL, "membership lost above eps", [w])
        if not at_eps and above:
            return Verdict(FAIL, "nested intersection exceeds the eps set", [w])
        checked += 1
    return Verdict(PASS, "eps set equals the intersection over larger slacks (sampled)",
                   values={"triples": checked, "etas": etas}, label="sampling-based")


def _run_sum_rule(problem: Problem, params: dict) -> Verdict:
    f = problem.function(params["f"])
    g = problem.function(params["g"])
    ctx = problem.context()
    x0 = _point(params)
    eps = float(params.get("eps", 0.0))
    eta = float(params.get("eta", 0.0))
    wf = DualTriple.from_array(np.asarray(params["wf"], dtype=float), problem.space_dim)
    wg = DualTriple.from_array(np.asarray(params["wg"], dtype=float), problem.space_dim)
    return check_sum_rule(f, g, x0, eps, eta, wf, wg, ctx)


def _run_domfc(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    return check_subdiff_in_domfc(f, _point(params), _param_triples(problem, params), ctx)


def _run_flip(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    x0 = _point(params)
    for w in _param_triples(problem, params):
        verdict = check_conjugate_flip(f, x0, w, ctx)
        if verdict.status == FAIL:
            return verdict
    return Verdict(PASS, "flip relation consistent on all samples")


def _run_envelope(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    return envelope_reconstruct(f, _point(params), np.asarray(params["at"], dtype=float), ctx,
                                rng=_rng(params))


def _run_subgradient_bridge(problem: Problem, params: dict) -> Verdict:
    from .subdiff import check_subgradient_bridge

    f = _fn(problem, params)
    ctx = problem.context()
    w0 = DualTriple.from_array(np.asarray(params["w0"], dtype=float), problem.space_dim)
    return check_subgradient_bridge(ConjugateOf(f), w0, _point(params), ctx)


def _run_derivative_identity(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    return check_derivative_set_identity(f, _point(params), float(params.get("eps", 0.0)),
                            _param_triples(problem, params), ctx)


def _run_dd_bound(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    return check_derivative_lower_bound(
        f, _point(params), np.asarray(params["dir"], dtype=float), float(params["eps"]),
        ctx, rng=_rng(params), n_samples=int(params.get("samples", 64)),
    )


def _run_sup_identity(problem: Problem, params: dict) -> Verdict:
    from .dc import conjugate_difference_gap

    f = problem.function(params["f"])
    g = problem.function(params["g"])
    ctx = problem.context(xgrid=problem.xgrid_for(params["f"]))
    lhs, rhs = conjugate_difference_gap(f, g, ctx.xgrid, None, ctx)
    tol = float(params.get("tol", 1e-3))
    same = (lhs == rhs) if (np.isinf(lhs) or np.isinf(rhs)) else abs(lhs - rhs) <= tol
    values = {"primal_sup": lhs, "dual_sup": rhs}
    if same:
        return Verdict(PASS, "both suprema agree", values=values)
    return Verdict(FAIL, "conjugate-difference identity violated",
                   [{"primal_sup": lhs, "dual_sup": rhs}], values)


def _need_dc(problem: Problem):
    if problem.dc is None:
        raise ProblemFileError("dc", "this check requires a dc section")
    return problem.dc


def _run_dc_inclusion(problem: Problem, params: dict) -> Verdict:
    p = _need_dc(problem)
    ctx = problem.context()
    lambdas = [float(v) for v in params.get("lambda_grid", DEFAULT_LAMBDAS)]
    return check_dc_subdiff_inclusion(p, _point(params), float(params.get("eps", 0.0)),
                                      lambdas, ctx, _rng(params),
                                      int(params.get("samples", 32)))


def _run_global_necessary(problem: Problem, params: dict) -> Verdict:
    p = _need_dc(problem)
    ctx = problem.context()
    eps_list = [float(v) for v in params.get("eps_grid", DEFAULT_EPS_GRID)]
    return check_global_necessary(p, _point(params), eps_list, ctx, _rng(params),
                                  int(params.get("samples", 100)))


def _run_eps_necessary(problem: Problem, params: dict) -> Verdict:
    p = _need_dc(problem)
    ctx = problem.context()
    lambdas = [float(v) for v in params.get("lambda_grid", DEFAULT_LAMBDAS)]
    return check_eps_necessary(p, _point(params), float(params.get("eps", 0.0)), lambdas,
                               ctx, _rng(params), int(params.get("samples", 100)))


def _run_eps_minimizer(problem: Problem, params: dict) -> Verdict:
    p = _need_dc(problem)
    ctx = problem.context()
    return is_eps_minimizer(p, _point(params), float(params.get("eps", 0.0)), ctx)


def _run_conjugate_value(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context(xgrid=problem.xgrid_for(params["function"]))
    w = DualTriple.from_array(np.asarray(params["at"], dtype=float), problem.space_dim)
    val = c_conjugate(f, w, ctx)
    values = {"value": val}
    if "expected" in params:
        exp = float(params["expected"])
        tol = float(params.get("tol", 1e-9))
        if not (abs(val - exp) <= tol):
            return Verdict(FAIL, "conjugate value off its expected value", [w], values)
        values["expected"] = exp
    return Verdict(PASS, "conjugate evaluated", values=values)


def _run_dirderiv_value(problem: Problem, params: dict) -> Verdict:
    f = _fn(problem, params)
    ctx = problem.context()
    val = eps_directional_derivative(f, _point(params), np.asarray(params["dir"], dtype=float),
                                     float(params.get("eps", 0.0)), ctx)
    values = {"value": val}
    if "expected" in params:
        exp = float(params["expected"])
        tol = float(params.get("tol", 1e-6))
        if not (abs(val - exp) <= tol):
            return Verdict(FAIL, "directional derivative off its expected value",
                           [params.get("dir")], values)
    return Verdict(PASS, "directional derivative evaluated", values=values)


REGISTRY = {
    "separation-certificate": (
        "every point outside a flagged evenly convex set admits a strict linear separator",
        _run_separation,
    ),
    "biconjugate-identity": (
        "the double conjugate minorizes the model and restores certified evenly convex models",
        _run_biconjugate,
    ),
    "eprime-convexity": (
        "conjugates pass the dual biconjugate fixed-point test",
        _run_eprime,
    ),
    "subgradient-inequality-equivalence": (
        "conjugate-equality membership matches the defining subgradient inequality",
        _run_subgradient_equivalence,
    ),
    "subdiff-product-form": (
        "eps-subgradient membership factors into classical part times admissibility cone",
        _run_product_form,
    ),
    "eps-monotonicity": (
        "eps-subdifferentials grow with the slack",
        _run_monotonicity,
    ),
    "eps-nested-intersection": (
        "the eps set equals the intersection of all larger-slack sets",
        _run_nested_intersection,
    ),
    "sum-rule": (
        "subgradients of the parts sum into subgradients of the sum",
        _run_sum_rule,
    ),
    "prop-subdiff-in-domfc": (
        "every subgradient triple lies in the domain of the conjugate",
        _run_domfc,
    ),
    "conjugate-flip": (
        "primal subgradients flip to dual subgradients of the conjugate",
        _run_flip,
    ),
    "envelope-reconstruct": (
        "coupling differences over the subdifferential rebuild the function",
        _run_envelope,
    ),
    "thm-subgradient-bridge": (
        "dual subgradients become classical ones when the dual domain keeps the gate open",
        _run_subgradient_bridge,
    ),
    "thm-directional-derivative-identity": (
        "derivative-side and function-side subgradient sets agree on the normal-cone slice",
        _run_derivative_identity,
    ),
    "cor-directional-derivative-bound": (
        "the eps-directional derivative dominates coupling values over the restricted subdifferential",
        _run_dd_bound,
    ),
    "lem-sup-identity": (
        "sup of g - f equals sup of the conjugate difference",
        _run_sup_identity,
    ),
    "thm-dc-star-inclusion": (
        "DC subgradients pass the star-difference inclusion for every lambda",
        _run_dc_inclusion,
    ),
    "cor-global-necessary": (
        "global minimality forces the eps-subdifferential inclusion (necessary, not sufficient)",
        _run_global_necessary,
    ),
    "cor-eps-necessary": (
        "eps-minimality forces the lambda-shifted inclusion (necessary, not sufficient)",
        _run_eps_necessary,
    ),
    "eps-minimizer": (
        "grid certification of eps-minimality over the declared search box",
        _run_eps_minimizer,
    ),
    "conjugate-value": (
        "conjugate evaluation at a dual triple",
        _run_conjugate_value,
    ),
    "dirderiv-value": (
        "eps-directional derivative evaluation",
        _run_dirderiv_value,
    ),
}


def registry_ids() -> list:
    return sorted(REGISTRY)


def run_check(problem: Problem, check: dict) -> CheckRecord:
    check_id = check["check_id"]
    if check_id not in REGISTRY:
        raise ProblemFileError("checks", f"unknown check_id {check_id!r}")
    statement, runner = REGISTRY[check_id]
    t0 = time.perf_counter()
    try:
        verdict = runner(problem, check)
    except ProblemFileError:
        raise
    except KeyError as exc:
        raise ProblemFileError("checks", f"{check_id}: missing parameter {exc}") from None
    mode = problem.policy.mode
    return CheckRecord(check_id, statement, verdict, mode, runtime=time.perf_counter() - t0)
