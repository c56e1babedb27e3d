import numpy as np
import pytest

from econv.conjugate import ConjugateOf, EvalContext, WGridFunction
from econv.extreal import INF, EXACT
from econv.functions import Affine, Indicator, QuadraticRestricted, SumFunction
from econv.grids import GridSpec
from econv.report import FAIL, INCONCLUSIVE, PASS, VACUOUS
from econv.sets import interval_set, whole_space
from econv.spaces import DualTriple
from econv.subdiff import (
    c_eps_subdiff_member,
    c_subdiff_descriptor,
    check_conjugate_flip,
    check_subdiff_in_domfc,
    check_sum_rule,
    check_subgradient_bridge,
    cprime_subdiff_member,
    descriptor_separator,
    envelope_reconstruct,
    fenchel_eps_subdiff_member,
    v_cone_member,
)


def w1(xs, us, a):
    return DualTriple([xs], [us], a)


def parabola():
    return QuadraticRestricted([[1.0]], [0.0], 0.0, whole_space(1))


def test_fenchel_eps_membership_boundary(exact_ctx):
    f = parabola()
    assert fenchel_eps_subdiff_member(f, [0.0], [2.0], 1.0, exact_ctx)
    assert not fenchel_eps_subdiff_member(f, [0.0], [2.1], 1.0, exact_ctx)


def test_fenchel_eps_membership_halfplane(halfplane_indicator, exact_ctx):
    eps = 0.8
    t = eps / 2.0
    assert fenchel_eps_subdiff_member(halfplane_indicator, [0.0, 0.0], [t, t], eps, exact_ctx)
    assert not fenchel_eps_subdiff_member(halfplane_indicator, [0.0, 0.0], [t, 2 * t], eps, exact_ctx)


def test_v_cone_member_cases(quad_halfline, halfplane_indicator):
    assert v_cone_member(quad_halfline.domain(), [-1.0], 0.0)
    assert not v_cone_member(quad_halfline.domain(), [0.0], 0.0)
    assert v_cone_member(halfplane_indicator.domain(), [1.0, 1.0], 2.0)
    assert not v_cone_member(halfplane_indicator.domain(), [1.0, 0.0], 5.0)


def test_c_eps_membership_battery(quad_halfline, exact_ctx):
    assert c_eps_subdiff_member(quad_halfline, [1.5], w1(3.0, 0.0, 1.0), 0.0, exact_ctx)
    assert not c_eps_subdiff_member(quad_halfline, [2.0], w1(3.0, 0.0, 1.0), 0.0, exact_ctx)
    assert c_eps_subdiff_member(quad_halfline, [2.0], w1(4.0, -1.0, 0.0), 0.0, exact_ctx)
    # outside the effective domain the set is empty
    assert not c_eps_subdiff_member(quad_halfline, [-1.0], w1(-2.0, 0.0, 1.0), 0.0, exact_ctx)


def test_descriptor_intervals(quad_halfline, exact_ctx):
    # endpoints are exact up to the sqrt-width halo of the 1e-9 membership
    # slack crossed by quadratic growth
    d = c_subdiff_descriptor(quad_halfline, [2.0], 0.0, exact_ctx)
    lo, hi = d.interval()
    assert abs(lo - 4.0) <= 1e-4 and abs(hi - 4.0) <= 1e-4
    d = c_subdiff_descriptor(parabola(), [0.0], 1.0, exact_ctx)
    lo, hi = d.interval()
    assert abs(lo + 2.0) <= 1e-4 and abs(hi - 2.0) <= 1e-4
    empty = c_subdiff_descriptor(quad_halfline, [-1.0], 0.0, exact_ctx)
    assert empty.empty


def test_descriptor_interval_of_indicator(exact_ctx):
    # domain unbounded below: negative slopes have infinite support
    ind = Indicator(interval_set(hi=1.0, hi_strict=True))
    d = c_subdiff_descriptor(ind, [0.0], 1.0, exact_ctx)
    lo, hi = d.interval()
    assert abs(lo) <= 1e-6 and abs(hi - 1.0) <= 1e-6


def test_descriptor_unbounded_interval(exact_ctx):
    # at the corner of a closed ray the subdifferential is a full halfline
    # (positive slopes have infinite support and drop out)
    ind = Indicator(interval_set(lo=0.0))
    d = c_subdiff_descriptor(ind, [0.0], 1.0, exact_ctx)
    lo, hi = d.interval()
    assert lo == -INF and abs(hi) <= 1e-6


def test_descriptor_sampling_produces_members(quad_halfline, exact_ctx):
    rng = np.random.default_rng(0)
    d = c_subdiff_descriptor(quad_halfline, [1.0], 0.5, exact_ctx)
    members = d.sample_members(rng, 40)
    assert len(members) >= 30
    for w in members:
        assert d.member(w)


def test_cprime_membership_for_affine_conjugate(exact_ctx):
    g = ConjugateOf(Affine([1.0], 0.0))
    assert cprime_subdiff_member(g, w1(1.0, 0.0, 1.0), [5.0], exact_ctx)
    # the value at (1, 1, 0) is +inf (a domain point of the affine model
    # breaks the gate), so the dual subdifferential there is empty
    assert g.evaluate_w(w1(1.0, 1.0, 0.0), exact_ctx) == INF
    assert not cprime_subdiff_member(g, w1(1.0, 1.0, 0.0), [-1.0], exact_ctx)
    assert not cprime_subdiff_member(g, w1(1.0, 1.0, 0.0), [0.0], exact_ctx)


def test_conjugate_flip(quad_halfline, exact_ctx):
    both_true = check_conjugate_flip(quad_halfline, [2.0], w1(4.0, 0.0, 1.0), exact_ctx)
    assert both_true.status == PASS
    assert both_true.values["primal_member"] and both_true.values["dual_member"]
    both_false = check_conjugate_flip(quad_halfline, [2.0], w1(3.0, 0.0, 1.0), exact_ctx)
    assert both_false.status == PASS
    assert not both_false.values["primal_member"] and not both_false.values["dual_member"]
    aff = check_conjugate_flip(Affine([1.0], 0.0), [0.0], w1(1.0, 0.0, 1.0), exact_ctx)
    assert aff.values["primal_member"] and aff.values["dual_member"]


def test_sum_rule_on_restricted_pair(quad_halfline, exact_ctx):
    g = Indicator(interval_set(hi=1.0, hi_strict=True))
    ok = check_sum_rule(quad_halfline, g, [0.5], 0.0, 0.0,
                        w1(1.0, 0.0, 1.0), w1(0.0, 0.0, 1.0), exact_ctx)
    assert ok.status == PASS
    # a gate pair admissible for the sum but not for the parts alone
    total = SumFunction([quad_halfline, g])
    assert c_eps_subdiff_member(total, [0.5], w1(1.0, -1.0, 1.0), 0.0, exact_ctx)
    # (0, -1, 0) is not admissible for the indicator (its domain is
    # unbounded below), so the precondition fails rather than the rule
    guard = check_sum_rule(quad_halfline, g, [0.5], 0.0, 0.0,
                           w1(1.0, 0.0, 1.0), w1(0.0, -1.0, 0.0), exact_ctx)
    assert guard.status == VACUOUS and "precondition" in guard.reason


def test_sum_rule_affine(exact_ctx):
    f = Affine([1.0], 0.0)
    verdict = check_sum_rule(f, f, [0.0], 0.0, 0.0, w1(1.0, 0.0, 1.0), w1(1.0, 0.0, 1.0), exact_ctx)
    assert verdict.status == PASS
    total = SumFunction([f, f])
    assert c_eps_subdiff_member(total, [0.0], w1(2.0, 0.0, 2.0), 0.0, exact_ctx)


def test_subdiff_in_domfc(quad_halfline, exact_ctx):
    rng = np.random.default_rng(5)
    triples = [w1(rng.uniform(-5, 5), rng.uniform(-2, 1), rng.uniform(-1, 2)) for _ in range(200)]
    triples += [w1(4.0, -1.0, 1.0), w1(4.0, 0.0, 0.5)]
    verdict = check_subdiff_in_domfc(quad_halfline, [2.0], triples, exact_ctx)
    assert verdict.status == PASS and verdict.values["members_checked"] >= 2
    # the inclusion is strict: a conjugate-domain triple that is nobody's
    # subgradient at this base point
    from econv.conjugate import dom_fc_member

    probe = w1(3.0, 0.0, 1.0)
    assert dom_fc_member(quad_halfline, probe, exact_ctx)
    assert not c_eps_subdiff_member(quad_halfline, [2.0], probe, 0.0, exact_ctx)


def test_affine_subdiff_equals_conjugate_domain(exact_ctx):
    f = Affine([1.0], 0.0)
    d = c_subdiff_descriptor(f, [0.0], 0.0, exact_ctx)
    rng = np.random.default_rng(2)
    from econv.conjugate import dom_fc_member

    for w in d.sample_members(rng, 30):
        assert dom_fc_member(f, w, exact_ctx)
    # and conversely at this base point
    for a in (0.5, 1.0, 3.0):
        assert d.member(w1(1.0, 0.0, a))


def test_subgradient_bridge_pass(quad_halfline, exact_ctx):
    g = ConjugateOf(quad_halfline)
    verdict = check_subgradient_bridge(g, w1(4.0, 0.0, 1.0), [2.0], exact_ctx)
    assert verdict.status == PASS


def test_subgradient_bridge_hypothesis_fails(quad_halfline, exact_ctx):
    # at a base point outside the domain, alpha = 0 samples break the gate
    g = ConjugateOf(quad_halfline)
    bad = [w1(1.0, -1.0, 0.0)]
    verdict = check_subgradient_bridge(g, w1(4.0, 0.0, 1.0), [-3.0], exact_ctx, dom_samples=bad)
    assert verdict.status == VACUOUS and "hypothesis fails" in verdict.reason


def test_subgradient_bridge_empty_subdifferential(exact_ctx):
    spec = GridSpec([(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 1.0)
    vals = np.full(27, INF)
    vals[0] = 0.0
    g = WGridFunction(spec, vals)
    off_grid = w1(0.5, 0.5, 0.5)
    verdict = check_subgradient_bridge(g, off_grid, [0.0], exact_ctx)
    assert verdict.status == VACUOUS and "empty" in verdict.reason


def test_envelope_reconstruction(exact_ctx):
    f = Affine([2.0], 0.0)
    v = envelope_reconstruct(f, [0.0], [3.0], exact_ctx)
    assert v.status == PASS and v.values["sup"] == 6.0
    v = envelope_reconstruct(f, [1.0], [-1.0], exact_ctx)
    assert v.status == PASS and v.values["sup"] == -4.0
    quad = QuadraticRestricted([[1.0]], [0.0], 0.0, interval_set(0.0, lo_strict=True), econvex=True)
    v = envelope_reconstruct(quad, [2.0], [1.0], exact_ctx)
    assert v.status == INCONCLUSIVE and "not certified" in v.reason


def test_monotonicity_of_eps_membership(quad_halfline, exact_ctx):
    rng = np.random.default_rng(11)
    for _ in range(200):
        x0 = [float(rng.uniform(0.1, 3.0))]
        w = w1(rng.uniform(-2, 6), rng.uniform(-2, 0.5), rng.uniform(-0.5, 2))
        e1, e2 = sorted(rng.uniform(0, 2, size=2))
        if c_eps_subdiff_member(quad_halfline, x0, w, e1, exact_ctx):
            assert c_eps_subdiff_member(quad_halfline, x0, w, e2, exact_ctx)


def test_nested_intersection_of_eps_sets(quad_halfline, exact_ctx):
    rng = np.random.default_rng(12)
    eps = 0.5
    etas = [eps + 10.0 ** (-k) for k in range(1, 7)]
    for _ in range(200):
        x0 = [float(rng.uniform(0.1, 3.0))]
        w = w1(rng.uniform(-2, 6), rng.uniform(-2, 0.5), rng.uniform(-0.5, 2))
        at_eps = c_eps_subdiff_member(quad_halfline, x0, w, eps, exact_ctx)
        above = all(c_eps_subdiff_member(quad_halfline, x0, w, eta, exact_ctx) for eta in etas)
        assert at_eps == above


def test_descriptor_set_is_evenly_convex(quad_halfline, exact_ctx):
    rng = np.random.default_rng(3)
    d = c_subdiff_descriptor(quad_halfline, [1.0], 0.5, exact_ctx)
    members = d.sample_members(rng, 20)
    # convexity of sampled members
    for _ in range(40):
        i, j = rng.integers(0, len(members), size=2)
        t = float(rng.uniform(0, 1))
        wa, wb = members[i], members[j]
        mix = DualTriple(t * wa.xstar + (1 - t) * wb.xstar,
                         t * wa.ustar + (1 - t) * wb.ustar,
                         t * wa.alpha + (1 - t) * wb.alpha)
        assert d.member(mix)
    # strict separators for structured non-members
    non_members = [w1(9.0, 0.0, 1.0), w1(2.5, 1.0, 0.5), w1(2.5, 0.0, 0.0), w1(-6.0, -1.0, 1.0)]
    for w in non_members:
        assert not d.member(w)
        functional, certified = descriptor_separator(d, w)
        assert certified and functional is not None
        xdir, udir, beta = functional
        val_w = float(np.dot(xdir, w.xstar) + np.dot(udir, w.ustar) + beta * w.alpha)
        for y in members:
            val_y = float(np.dot(xdir, y.xstar) + np.dot(udir, y.ustar) + beta * y.alpha)
            assert val_y - val_w < 0


def test_descriptor_empty_flag_soundness(quad_halfline, exact_ctx):
    rng = np.random.default_rng(8)
    d = c_subdiff_descriptor(quad_halfline, [-2.0], 1.0, exact_ctx)
    assert d.empty
    for _ in range(100):
        w = w1(rng.uniform(-5, 5), rng.uniform(-3, 3), rng.uniform(-3, 3))
        assert not d.member(w)
