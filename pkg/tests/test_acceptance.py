"""Acceptance battery: every criterion runs at its stated tolerance and
prints one pass/fail line.  Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import time

import numpy as np

from econv.conjugate import EvalContext, biconjugate_many, c_conjugate, c_conjugate_argmax
from econv.dc import (
    check_eps_necessary,
    check_global_necessary,
    check_derivative_set_identity,
    dc_value,
    directional_derivative_model,
    eps_directional_derivative,
    is_eps_minimizer,
    support_identity_values,
    conjugate_difference_gap,
)
from econv.extreal import INF, NEG_INF, TolerancePolicy
from econv.functions import Affine, Indicator, QuadraticRestricted, SumFunction
from econv.grids import GridSpec
from econv.report import FAIL, PASS
from econv.repro import (
    entropy_dc_problem,
    linear_on_halfline,
    quadratic_on_halfline,
)
from econv.sets import interval_set, whole_space
from econv.spaces import DualTriple
from econv.subdiff import (
    c_eps_subdiff_member,
    c_subdiff_descriptor,
    check_sum_rule,
    fenchel_eps_subdiff_member,
    v_cone_member,
)
from econv.dc import DCProblem

EXACT = EvalContext.exact()

LABEL_PAIRS = ((-1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (1.0, 1.0))
ADMISSIBLE = {(-1.0, 0.0), (0.0, 1.0)}


def w1(xs, us, a):
    return DualTriple([xs], [us], a)


def _line(num, ok, detail):
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def parabola():
    return QuadraticRestricted([[1.0]], [0.0], 0.0, whole_space(1))


def test_criterion_01_conjugate_value_exact_and_grid():
    f = quadratic_on_halfline()
    w = w1(3.0, 0.0, 1.0)
    t0 = time.perf_counter()
    exact_val = c_conjugate(f, w, EXACT)
    gctx = EvalContext(policy=TolerancePolicy.grid(eq_tol=1e-6),
                       xgrid=GridSpec([(0.0, 10.0)], 1e-3))
    grid_val, arg = c_conjugate_argmax(f, w, gctx)
    elapsed = time.perf_counter() - t0
    ok = (
        exact_val == 2.25
        and abs(grid_val - 2.25) <= 1e-3
        and arg is not None
        and abs(float(arg[0]) - 1.5) <= 1e-2
        and elapsed < 1.0
    )
    _line(1, ok, f"conjugate 9/4 exact={exact_val}, grid={grid_val:.6f}, "
                 f"argmax={float(arg[0]):.4f}, {elapsed:.3f}s")


def test_criterion_02_conjugate_domain_classification():
    f = quadratic_on_halfline()
    mismatches = 0
    for xs in (-1.0, 0.0, 7.0):
        for pair in LABEL_PAIRS:
            got = c_conjugate(f, w1(xs, *pair), EXACT) < INF
            if got != (pair in ADMISSIBLE):
                mismatches += 1
    _line(2, mismatches == 0, f"12-triple conjugate-domain battery, {mismatches} mismatches")


def test_criterion_03_subdifferential_battery():
    f = quadratic_on_halfline()
    mismatches = 0
    for x0 in (0.5, 1.5, 2.0):
        for pair in LABEL_PAIRS:
            got = c_eps_subdiff_member(f, [x0], w1(2.0 * x0, *pair), 0.0, EXACT)
            if got != (pair in ADMISSIBLE):
                mismatches += 1
        probe = c_eps_subdiff_member(f, [x0], w1(3.0, 0.0, 1.0), 0.0, EXACT)
        if probe != (x0 == 1.5):
            mismatches += 1
    _line(3, mismatches == 0,
          f"subgradient battery at three base points, {mismatches} mismatches")


def test_criterion_04_entropy_pair_necessary_condition():
    t0 = time.perf_counter()
    p = entropy_dc_problem()
    ok_values = (
        dc_value(p, [1.0, 1.0], EXACT) == NEG_INF
        and dc_value(p, [0.0, 0.0], EXACT) == 0.0
    )
    rng = np.random.default_rng(20240501)
    necessary = check_global_necessary(p, [0.0, 0.0], (0.0, 0.5, 1.0, 2.0), EXACT, rng, 100)
    ok_necessary = necessary.status == PASS
    ok_minimizer = True
    for eps in (0.0, 1.0):
        v = is_eps_minimizer(p, [0.0, 0.0], eps, EXACT)
        ok_minimizer &= (
            v.status == FAIL
            and np.allclose(np.asarray(v.witnesses[0], dtype=float), [1.0, 1.0])
        )
    elapsed = time.perf_counter() - t0
    exhibit = ok_necessary and ok_minimizer  # necessary-but-not-sufficient pattern
    ok = ok_values and exhibit and elapsed < 10.0
    _line(4, ok, f"entropy pair: objective values, inclusion HOLDS for 4 eps with 100 "
                 f"samples each, non-minimizer witness (1,1); {elapsed:.2f}s")


def test_criterion_05_counter_instance_soundness():
    p = DCProblem(parabola(), Affine([2.0], 0.0), [(-4.0, 4.0)], 0.25)
    rng = np.random.default_rng(77)
    fails = check_global_necessary(p, [0.0], (0.0, 0.5, 1.0, 2.0), EXACT, rng, 100)
    wit_ok = False
    if fails.status == FAIL and fails.witnesses:
        wit = fails.witnesses[0]
        Dg = c_subdiff_descriptor(p.g, [0.0], float(fails.values["eps"]), EXACT)
        Df = c_subdiff_descriptor(p.f, [0.0], float(fails.values["eps"]), EXACT)
        wit_ok = Dg.member(wit) and not Df.member(wit)
    holds = check_global_necessary(p, [1.0], (0.0, 0.5, 1.0, 2.0), EXACT, rng, 100)
    minimizer = is_eps_minimizer(p, [0.0], 1.0, EXACT)
    eps_nec = check_eps_necessary(p, [0.0], 1.0, (0.0, 0.5, 1.0, 5.0), EXACT, rng, 100)
    ok = (
        fails.status == FAIL and wit_ok
        and holds.status == PASS
        and minimizer.status == PASS
        and eps_nec.status == PASS
    )
    _line(5, ok, "parabola/affine counter-instance: FAILS at 0 with replayable witness, "
                 "HOLDS at 1, 1-minimizer certified, shifted inclusion HOLDS")


def test_criterion_06_derivative_set_identity():
    f = quadratic_on_halfline()
    rng = np.random.default_rng(606)
    h = directional_derivative_model(f, [1.0], 0.0, EXACT)
    samples = []
    for _ in range(500):
        stratum = rng.integers(0, 4)
        if stratum == 0:  # on the set
            samples.append(w1(2.0, 0.0, float(rng.uniform(0.1, 3.0))))
        elif stratum == 1:  # linear part off by a clear margin
            delta = float((1e-3 + rng.exponential(1.0)) * rng.choice([-1.0, 1.0]))
            samples.append(w1(2.0 + delta, 0.0, 1.0))
        elif stratum == 2:  # admissibility factor violated
            samples.append(w1(2.0, float(-rng.exponential(1.0) - 1e-3), 1.0))
        else:
            samples.append(w1(float(rng.normal(0, 3)), float(rng.normal(0, 1)),
                              float(rng.normal(0, 1))))
    verdict = check_derivative_set_identity(f, [1.0], 0.0, samples, EXACT, dd_model=h)
    ok = (
        verdict.status == PASS
        and verdict.values["agree"] == 500
        and verdict.values["inconclusive"] == 0
        and verdict.values["members"] >= 50
    )
    _line(6, ok, f"two-sided derivative/subgradient identity on 500 triples: "
                 f"agree={verdict.values['agree']}, members={verdict.values['members']}")


def _catalog_pool():
    return [
        (parabola(), [0.0, 0.5, -1.0]),
        (quadratic_on_halfline(), [0.5, 1.0, 2.0]),
        (Affine([2.0], 0.0), [0.0, 1.0, -2.0]),
        (QuadraticRestricted([[0.5]], [1.0], -0.25, interval_set(-1.0, 2.0)), [0.0, 1.0, 1.5]),
        (Indicator(interval_set(hi=1.0, hi_strict=True)), [0.0, 0.5, -3.0]),
        (linear_on_halfline(), [0.5, 1.0, 3.0]),
    ]


def test_criterion_07_product_factorization_consistency():
    rng = np.random.default_rng(707)
    pool = _catalog_pool()
    mismatches = 0
    for i in range(1000):
        f, points = pool[i % len(pool)]
        x0 = [float(points[i % len(points)] + rng.normal(0, 0.25))]
        eps = float(abs(rng.normal(0, 1.0)))
        if rng.random() < 0.5:
            w = w1(float(rng.normal(0, 3)), float(rng.normal(0, 1)), float(rng.normal(0, 1)))
        else:  # structured: admissible gate with a plausible slope
            u = float(-rng.exponential(1.0)) if rng.random() < 0.7 else 0.0
            sv = f.dom_support([u])
            if sv.value == INF:
                u, sv = 0.0, f.dom_support([0.0])
            alpha = sv.value + float(rng.exponential(1.0)) + 1e-9
            w = w1(float(rng.normal(0, 3)), u, alpha)
        joint = c_eps_subdiff_member(f, x0, w, eps, EXACT)
        split = (
            fenchel_eps_subdiff_member(f, x0, w.xstar, eps, EXACT)
            and v_cone_member(f.domain(), w.ustar, w.alpha)
        )
        if joint != split:
            mismatches += 1
    _line(7, mismatches == 0, f"membership equals its product factors on 1000 tuples, "
                              f"{mismatches} mismatches")


def test_criterion_08_sum_rule_instances():
    rng = np.random.default_rng(808)
    violations = 0
    vacuous = 0
    total = 0
    for i in range(334):
        q1, q2 = rng.uniform(0.25, 2.0, size=2)
        b1, b2 = rng.uniform(-2.0, 2.0, size=2)
        if i % 3 == 0:
            f = QuadraticRestricted([[q1]], [b1], 0.0, whole_space(1))
            g = QuadraticRestricted([[q2]], [b2], 0.0, whole_space(1))
            x0 = float(rng.uniform(-1.5, 1.5))
        elif i % 3 == 1:
            f = QuadraticRestricted([[q1]], [b1], 0.0, interval_set(0.0, lo_strict=True),
                                    econvex=True)
            g = Affine([b2], 0.5)
            x0 = float(rng.uniform(0.5, 2.0))
        else:
            f = QuadraticRestricted([[q1]], [b1], 0.0, interval_set(-1.0))
            g = QuadraticRestricted([[q2]], [b2], 1.0, whole_space(1))
            x0 = float(rng.uniform(-0.5, 1.5))
        eps = float(abs(rng.normal(0, 0.8))) + 0.05
        for eta in (0.0, eps / 2.0, eps):
            total += 1
            wf = _member_triple(f, x0, eta, rng)
            wg = _member_triple(g, x0, eps - eta, rng)
            verdict = check_sum_rule(f, g, [x0], eps, eta, wf, wg, EXACT)
            if verdict.status == FAIL:
                violations += 1
            elif verdict.status != PASS:
                vacuous += 1
    ok = violations == 0 and vacuous <= total // 10
    _line(8, ok, f"sum rule on {total} seeded instances: {violations} violations, "
                 f"{vacuous} unmet preconditions")


def _member_triple(f, x0, eps, rng):
    """A triple built from the gradient center and a verified gate pair."""
    from econv.subdiff import _gradient_estimate

    if isinstance(f, Affine):
        s = float(f.a[0])  # the conjugate is finite only exactly at the slope
    else:
        center = _gradient_estimate(f, np.array([x0]))
        s = 0.0 if center is None else float(center[0])
    if eps > 0 and isinstance(f, QuadraticRestricted) and np.any(f.Q):
        radius = 2.0 * np.sqrt(float(f.Q[0, 0]) * eps)
        s += float(rng.uniform(-0.95, 0.95)) * radius
    u = 0.0 if rng.random() < 0.5 else float(-rng.exponential(1.0))
    sv = f.dom_support([u])
    if sv.value == INF:
        u, sv = 0.0, f.dom_support([0.0])
    alpha = sv.value + float(rng.exponential(1.0)) + 1e-9
    return w1(s, u, alpha)


def test_criterion_09_conjugate_difference_suprema():
    grid = GridSpec([(-4.0, 4.0)], 1e-3)
    lhs1, rhs1 = conjugate_difference_gap(parabola(), Affine([1.0], 0.0), grid, None, EXACT)
    lhs2, rhs2 = conjugate_difference_gap(parabola(), Affine([3.0], -1.0), grid, None, EXACT)
    ok = (
        abs(lhs1 - 0.25) <= 1e-3 and abs(rhs1 - 0.25) <= 1e-3
        and abs(lhs2 - 1.25) <= 1e-3 and abs(rhs2 - 1.25) <= 1e-3
    )
    _line(9, ok, f"sup identity: ({lhs1:.4f}, {rhs1:.4f}) vs 1/4 and "
                 f"({lhs2:.4f}, {rhs2:.4f}) vs 5/4")


def test_criterion_10_biconjugate_of_linear_halfline():
    f = linear_on_halfline()
    step = 1e-3
    ctx = EvalContext(policy=TolerancePolicy.grid(eq_tol=1e-6), w_step=0.1)
    pts = GridSpec([(-1.0, 2.0)], step).points()
    bic = biconjugate_many(f, pts, ctx)
    fv = f.evaluate_many(pts)
    no_overshoot = not np.any(bic > fv + 1e-12)
    interior = pts[:, 0] >= 10 * step
    gap = float(np.max(np.abs(bic[interior] - fv[interior])))
    ok = no_overshoot and gap <= 1e-2
    _line(10, ok, f"grid envelope stays below the model everywhere; interior gap {gap:.2e}")


def test_criterion_11_monotonicity_and_nesting():
    rng = np.random.default_rng(1111)
    f = quadratic_on_halfline()
    g = parabola()
    violations = 0
    for i in range(500):
        model = f if i % 2 else g
        x0 = [float(rng.uniform(0.2, 2.5))]
        w = w1(float(rng.normal(2.0, 2.0)), float(-abs(rng.normal(0, 1.0))),
               float(abs(rng.normal(0, 1.0)) + 1e-3))
        e1, e2 = np.sort(rng.uniform(0.0, 2.0, size=2))
        if c_eps_subdiff_member(model, x0, w, float(e1), EXACT) and not c_eps_subdiff_member(
            model, x0, w, float(e2), EXACT
        ):
            violations += 1
        eps = float(e1)
        at_eps = c_eps_subdiff_member(model, x0, w, eps, EXACT)
        nested = all(
            c_eps_subdiff_member(model, x0, w, eps + 10.0 ** (-k), EXACT) for k in range(1, 7)
        )
        if at_eps != nested:
            violations += 1
    _line(11, violations == 0,
          f"500 monotonicity and nested-intersection implications, {violations} violations")


def test_criterion_12_directional_derivative_values():
    f = parabola()
    ok = True
    details = []
    for u in (1.0, -1.0, 2.0, -2.0):
        val = eps_directional_derivative(f, [0.0], [u], 1.0, EXACT)
        ok &= abs(val - 2.0 * abs(u)) <= 1e-4
        dd, sup = support_identity_values(f, [0.0], [u], 1.0, EXACT)
        ok &= abs(dd - sup) <= 1e-3
        details.append(f"u={u:+.0f}:{val:.6f}")
    _line(12, ok, "derivative values 2|u| and support cross-check: " + ", ".join(details))
