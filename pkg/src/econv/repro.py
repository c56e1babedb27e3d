"""Fixed reproduction corpus: three catalog instances with known values.

Suite "2" drives the linear model on the open half-line (separation
certificates and the grid envelope identity), suite "4" the quadratic on
the open half-line (conjugate value, conjugate-domain classification, and
the subdifferential battery), and suite "5" the planar entropy-type DC
pair (objective values, the necessary-condition checker, and the
non-sufficiency exhibit).
"""

from __future__ import annotations

import time

import numpy as np

from .conjugate import EvalContext, c_conjugate, c_conjugate_argmax
from .dc import DCProblem, check_global_necessary, dc_value, is_eps_minimizer
from .extreal import INF, NEG_INF, TolerancePolicy
from .functions import Indicator, QuadraticRestricted, XLogXOverY
from .grids import GridSpec
from .report import FAIL, PASS, CheckRecord, Report, Verdict, input_hash_of
from .sets import FlaggedConvexSet, interval_set, strictly_separates
from .spaces import DualTriple, XHalfspace
from .subdiff import c_eps_subdiff_member

__all__ = [
    "linear_on_halfline",
    "quadratic_on_halfline",
    "entropy_model",
    "open_halfplane_indicator",
    "entropy_dc_problem",
    "epigraph_of_linear_halfline",
    "repro",
    "SUITES",
]


def linear_on_halfline() -> QuadraticRestricted:
    """f(x) = x for x > 0, +inf otherwise; evenly convex but not closed."""
    return QuadraticRestricted(
        np.zeros((1, 1)), np.array([1.0]), 0.0, interval_set(0.0, lo_strict=True), econvex=True
    )


def quadratic_on_halfline() -> QuadraticRestricted:
    """f(x) = x^2 for x > 0, +inf otherwise."""
    return QuadraticRestricted(
        np.array([[1.0]]), np.array([0.0]), 0.0, interval_set(0.0, lo_strict=True), econvex=True
    )


def entropy_model() -> XLogXOverY:
    return XLogXOverY()


def open_halfplane_indicator() -> Indicator:
    """Indicator of the open halfplane x + y < 2."""
    return Indicator(FlaggedConvexSet([XHalfspace(np.array([1.0, 1.0]), 2.0, True)], dim=2))


def entropy_dc_problem() -> DCProblem:
    return DCProblem(
        entropy_model(),
        open_halfplane_indicator(),
        search_box=[(-0.5, 1.5), (-0.5, 1.5)],
        search_step=0.25,
    )


def epigraph_of_linear_halfline() -> FlaggedConvexSet:
    """{(x, r) : x > 0, r >= x}: convex, not closed, evenly convex."""
    return FlaggedConvexSet(
        [
            XHalfspace(np.array([-1.0, 0.0]), 0.0, True),
            XHalfspace(np.array([1.0, -1.0]), 0.0, False),
        ],
        dim=2,
    )


def _record(check_id: str, statement: str, verdict: Verdict, mode: str, t0: float) -> CheckRecord:
    return CheckRecord(check_id, statement, verdict, mode, runtime=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# suite 2: linear growth on the open half-line
# ---------------------------------------------------------------------------


def _suite_2() -> list:
    out = []
    t0 = time.perf_counter()
    epi = epigraph_of_linear_halfline()
    directions = []
    verdict = None
    for r in (0.0, 1.0, 5.0):
        d = strictly_separates(epi, np.array([0.0, r]))
        if d is None:
            verdict = Verdict(FAIL, "boundary point was classified inside", [[0.0, r]])
            break
        directions.append(list(map(float, d)))
    if verdict is None:
        verdict = Verdict(PASS, "separators certified at every boundary probe",
                          values={"directions": directions})
    out.append(_record("repro2-separation",
                       "points on the closed boundary ray admit strict separators from the epigraph",
                       verdict, "EXACT", t0))

    t0 = time.perf_counter()
    f = linear_on_halfline()
    ctx = EvalContext(policy=TolerancePolicy.grid(eq_tol=1e-6), w_step=0.1)
    step = 1e-3
    pts = GridSpec([(-1.0, 2.0)], step).points()
    from .conjugate import biconjugate_many

    bic = biconjugate_many(f, pts, ctx)
    fv = f.evaluate_many(pts)
    if np.any(bic > fv + 1e-12):
        i = int(np.argmax(bic - fv))
        verdict = Verdict(FAIL, "envelope exceeded the model", [pts[i]],
                          {"envelope": bic[i], "value": fv[i]})
    else:
        interior = pts[:, 0] >= 10 * step
        gap = float(np.max(np.abs(bic[interior] - fv[interior])))
        if gap <= 1e-2:
            verdict = Verdict(PASS, "grid envelope matches away from the open boundary",
                              values={"max_gap": gap})
        else:
            verdict = Verdict(FAIL, "grid envelope off the model", [],
                              {"max_gap": gap})
    out.append(_record("repro2-biconjugate",
                       "grid double conjugate minorizes everywhere and restores the model "
                       "at clearance 10 steps from the open boundary",
                       verdict, "GRID", t0))
    return out


# ---------------------------------------------------------------------------
# suite 4: quadratic on the open half-line
# ---------------------------------------------------------------------------

_LABEL_PAIRS = ((-1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (1.0, 1.0))


def _pair_admissible(u: float, a: float) -> bool:
    # admissible exactly when u <= 0 and a >= 0, excluding (0, 0)
    return u <= 0.0 and a >= 0.0 and not (u == 0.0 and a == 0.0)


def _suite_4() -> list:
    out = []
    f = quadratic_on_halfline()
    w0 = DualTriple([3.0], [0.0], 1.0)

    t0 = time.perf_counter()
    exact_val = c_conjugate(f, w0, EvalContext.exact())
    if exact_val == 2.25:
        verdict = Verdict(PASS, "closed-form conjugate is exactly 9/4", values={"value": exact_val})
    else:
        verdict = Verdict(FAIL, "closed-form conjugate off 9/4", [w0], {"value": exact_val})
    out.append(_record("repro4-conjugate-exact",
                       "conjugate of the restricted quadratic at (3, 0, 1) equals 9/4",
                       verdict, "EXACT", t0))

    t0 = time.perf_counter()
    gctx = EvalContext(policy=TolerancePolicy.grid(eq_tol=1e-6), xgrid=GridSpec([(0.0, 10.0)], 1e-3))
    gval, arg = c_conjugate_argmax(f, w0, gctx)
    ok = abs(gval - 2.25) <= 1e-3 and arg is not None and abs(float(arg[0]) - 1.5) <= 1e-2
    values = {"value": gval, "argmax": None if arg is None else float(arg[0])}
    verdict = (Verdict(PASS, "grid conjugate matches with the right maximizer", values=values)
               if ok else Verdict(FAIL, "grid conjugate or maximizer off", [w0], values))
    out.append(_record("repro4-conjugate-grid",
                       "grid conjugate reproduces 9/4 within 1e-3 with maximizer 3/2",
                       verdict, "GRID", t0))

    t0 = time.perf_counter()
    ctx = EvalContext.exact()
    mism = []
    for xs in (-1.0, 0.0, 7.0):
        for (u, a) in _LABEL_PAIRS:
            w = DualTriple([xs], [u], a)
            got = c_conjugate(f, w, ctx) < INF
            if got != _pair_admissible(u, a):
                mism.append(w)
    verdict = (Verdict(PASS, "12-triple classification matches the product formula",
                       values={"triples": 12})
               if not mism else Verdict(FAIL, "conjugate-domain classification mismatch", mism))
    out.append(_record("repro4-domfc-battery",
                       "conjugate domain is (all x*) times (u* <= 0, alpha >= 0, not both zero)",
                       verdict, "EXACT", t0))

    t0 = time.perf_counter()
    mism = []
    for x0 in (0.5, 1.5, 2.0):
        for (u, a) in _LABEL_PAIRS:
            w = DualTriple([2.0 * x0], [u], a)
            got = c_eps_subdiff_member(f, [x0], w, 0.0, ctx)
            if got != _pair_admissible(u, a):
                mism.append(w)
        w_probe = DualTriple([3.0], [0.0], 1.0)
        got = c_eps_subdiff_member(f, [x0], w_probe, 0.0, ctx)
        if got != (x0 == 1.5):
            mism.append(w_probe)
    verdict = (Verdict(PASS, "membership battery reproduces the product set at every base point",
                       values={"points": [0.5, 1.5, 2.0]})
               if not mism else Verdict(FAIL, "subdifferential battery mismatch", mism))
    out.append(_record("repro4-subdiff-battery",
                       "subgradient triples are (2 x0) times the admissible pairs; "
                       "(3,0,1) is accepted only where the conjugate supremum is attained",
                       verdict, "EXACT", t0))
    return out


# ---------------------------------------------------------------------------
# suite 5: entropy-type DC pair on the plane
# ---------------------------------------------------------------------------


def _suite_5() -> list:
    out = []
    p = entropy_dc_problem()
    ctx = EvalContext.exact()

    t0 = time.perf_counter()
    expected = {(1.0, 1.0): NEG_INF, (0.0, 0.0): 0.0, (3.0, 3.0): INF}
    bad = []
    got = {}
    for pt, want in expected.items():
        val = dc_value(p, np.array(pt), ctx)
        got[str(pt)] = val
        if val != want:
            bad.append(list(pt))
    verdict = (Verdict(PASS, "objective values match at the three probes", values=got)
               if not bad else Verdict(FAIL, "objective value mismatch", bad, got))
    out.append(_record("repro5-dc-values",
                       "difference objective is -inf at (1,1), 0 at (0,0), +inf at (3,3)",
                       verdict, "EXACT", t0))

    t0 = time.perf_counter()
    verdict = check_global_necessary(p, np.zeros(2), (0.0, 0.5, 1.0, 2.0), ctx,
                                     np.random.default_rng(20240501), 100)
    out.append(_record("repro5-global-necessary",
                       "necessary inclusion holds at the non-minimizer (0, 0) for every eps tested",
                       verdict, "EXACT", t0))

    t0 = time.perf_counter()
    sub = {}
    ok = verdict.status == PASS
    for eps in (0.0, 1.0):
        v = is_eps_minimizer(p, np.zeros(2), eps, ctx)
        witness_ok = (
            v.status == FAIL
            and v.witnesses
            and np.allclose(np.asarray(v.witnesses[0], dtype=float), [1.0, 1.0])
        )
        sub[f"eps={eps}"] = v.status + ("@(1,1)" if witness_ok else "")
        ok = ok and witness_ok
    if ok:
        exhibit = Verdict(PASS, "necessary condition holds at (0,0) although (1,1) improves "
                                "without bound: the condition is not sufficient",
                          values=sub)
    else:
        exhibit = Verdict(FAIL, "exhibit pattern broken", [sub], sub)
    out.append(_record("repro5-non-sufficiency",
                       "the point passing the necessary condition is not an eps-minimizer "
                       "for any eps probed (witness (1,1))",
                       exhibit, "EXACT", t0))
    return out


SUITES = {"2": _suite_2, "4": _suite_4, "5": _suite_5}


def repro(examples=("2", "4", "5")) -> Report:
    report = Report()
    payload = ",".join(examples).encode()
    report.input_hash = input_hash_of(payload)
    for ex in examples:
        if ex not in SUITES:
            raise ValueError(f"unknown example suite {ex!r}; choose from 2, 4, 5")
        for rec in SUITES[ex]():
            report.add(rec)
    return report
