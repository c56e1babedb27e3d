import math

import numpy as np
import pytest

from econv.extreal import INF, TolerancePolicy
from econv.functions import (
    Affine,
    GridFunction,
    ImproperFunctionError,
    Indicator,
    QuadraticRestricted,
    SumFunction,
    XLogXOverY,
    grid_sample,
)
from econv.grids import BudgetExceededError, GridSpec
from econv.sets import FlaggedConvexSet, interval_set, whole_space
from econv.spaces import XHalfspace


def quad_on_ray():
    return QuadraticRestricted([[1.0]], [0.0], 0.0, interval_set(0.0, lo_strict=True), econvex=True)


def test_evaluate_catalog_values(entropy, halfplane_indicator):
    assert entropy.evaluate([1.0, 1.0]) == 0.0
    assert quad_on_ray().evaluate([-1.0]) == INF
    assert halfplane_indicator.evaluate([0.0, 0.0]) == 0.0
    assert halfplane_indicator.evaluate([1.0, 1.0]) == INF
    assert entropy.evaluate([0.5, 0.25]) == pytest.approx(0.5 * math.log(2.0))


def test_entropy_origin_handling():
    with_origin = XLogXOverY()
    assert with_origin.evaluate([0.0, 0.0]) == 0.0
    without = XLogXOverY(include_origin=False)
    assert without.evaluate([0.0, 0.0]) == INF
    # the isolated origin flips support attainment at the wedge apex
    sv_with = with_origin.dom_support([-1.0, 0.0])
    sv_without = without.dom_support([-1.0, 0.0])
    assert sv_with.value == sv_without.value == 0.0
    assert sv_with.attained and not sv_without.attained


def test_domains():
    lo, lo_s, hi, hi_s = quad_on_ray().domain().interval()
    assert (lo, hi) == (0.0, INF) and lo_s
    assert Affine([2.0], 1.0).domain().halfspaces == ()
    combo = SumFunction([quad_on_ray(), Indicator(interval_set(hi=1.0))])
    lo, lo_s, hi, hi_s = combo.domain().interval()
    assert (lo, hi) == (0.0, 1.0) and lo_s and not hi_s


def test_domain_matches_evaluation():
    rng = np.random.default_rng(4)
    models = [
        quad_on_ray(),
        Affine([1.5], -2.0),
        Indicator(interval_set(-1.0, 1.0, hi_strict=True)),
        SumFunction([quad_on_ray(), Affine([1.0], 0.0)]),
    ]
    for f in models:
        pts = rng.uniform(-3, 3, size=(200, f.dim))
        vals = f.evaluate_many(pts)
        inside = f.domain().member_many(pts)
        assert np.array_equal(np.isfinite(vals), inside)


def test_evaluate_many_matches_scalar(entropy):
    rng = np.random.default_rng(8)
    for f in (quad_on_ray(), Affine([2.0], 1.0), entropy):
        pts = rng.uniform(-1, 2, size=(100, f.dim))
        vec = f.evaluate_many(pts)
        for p, v in zip(pts, vec):
            assert f.evaluate(p) == v


def test_grid_sample_values():
    g = grid_sample(QuadraticRestricted([[1.0]], [0.0], 0.0, whole_space(1)), [(-1.0, 1.0)], 1.0)
    assert list(g.values) == [1.0, 0.0, 1.0]
    g2 = grid_sample(quad_on_ray(), [(0.0, 1.0)], 0.5)
    assert g2.values[0] == INF and g2.values[1] == 0.25
    with pytest.raises(BudgetExceededError):
        grid_sample(quad_on_ray(), [(0.0, 1.0)], 1e-9, max_nodes=1000)


def test_grid_function_nearest_node_semantics():
    g = GridFunction(GridSpec([(0.0, 1.0)], 0.5), [1.0, 2.0, 3.0])
    assert g.evaluate([0.2]) == 1.0  # nearest node 0.0
    assert g.evaluate([0.3]) == 2.0
    assert g.evaluate([1.6]) == INF  # beyond the half-step apron
    lo, _, hi, _ = g.domain().interval()
    assert (lo, hi) == (0.0, 1.0)


def test_grid_function_2d_domain_hull():
    spec = GridSpec([(0.0, 1.0), (0.0, 1.0)], 0.5)
    vals = np.full(9, INF)
    vals[[0, 2, 6]] = 1.0  # corners (0,0), (0,1), (1,0)
    g = GridFunction(spec, vals)
    dom = g.domain()
    assert dom.member([0.2, 0.2])
    assert not dom.member([0.9, 0.9])


def test_properness_enforced():
    with pytest.raises(ImproperFunctionError):
        Indicator(interval_set(1.0, 0.0))
    with pytest.raises(ImproperFunctionError):
        GridFunction(GridSpec([(0.0, 1.0)], 0.5), [INF, INF, INF])
    with pytest.raises(ImproperFunctionError):
        GridFunction(GridSpec([(0.0, 1.0)], 0.5), [0.0, -INF, 1.0])
    with pytest.raises(ValueError):
        QuadraticRestricted([[-1.0]], [0.0], 0.0, whole_space(1))


def test_fenchel_closed_forms():
    f_free = QuadraticRestricted([[1.0]], [0.0], 0.0, whole_space(1))
    assert f_free.fenchel([2.0]) == 1.0
    assert quad_on_ray().fenchel([-1.0]) == 0.0  # sup approached at the open end
    assert quad_on_ray().fenchel([3.0]) == 2.25
    aff = Affine([1.0], 0.0)
    assert aff.fenchel([1.0]) == 0.0 and aff.fenchel([1.1]) == INF
    ind = Indicator(FlaggedConvexSet([XHalfspace([1.0, 1.0], 2.0, True)], dim=2))
    assert ind.fenchel([1.0, 1.0]) == 2.0
    assert ind.fenchel([1.0, 0.0]) == INF


def test_fenchel_linear_on_restricted_domain():
    lin = QuadraticRestricted(np.zeros((1, 1)), [1.0], 0.0, interval_set(0.0, lo_strict=True))
    assert lin.fenchel([0.5]) == 0.0
    assert lin.fenchel([1.0]) == 0.0
    assert lin.fenchel([1.5]) == INF


def test_fenchel_2d_positive_definite_vs_grid_oracle():
    dom = FlaggedConvexSet(
        [XHalfspace([1.0, 0.0], 1.0, False), XHalfspace([0.0, -1.0], 0.0, True)], dim=2
    )
    f = QuadraticRestricted([[1.0, 0.0], [0.0, 2.0]], [0.5, -1.0], 0.25, dom)
    rng = np.random.default_rng(3)
    spec = GridSpec([(-6.0, 1.0), (0.0, 6.0)], 0.01)
    pts = spec.points()
    fv = f.evaluate_many(pts)
    finite = np.isfinite(fv)
    for _ in range(20):
        s = rng.uniform(-3, 3, size=2)
        exact = f.fenchel(s)
        brute = float(np.max((pts[finite] @ s) - fv[finite]))
        # the grid supremum never exceeds the closed form and approaches it
        # up to one boundary step times the local slope
        assert brute <= exact + 1e-9
        assert exact - brute <= 0.05


def test_fenchel_many_matches_scalar():
    f = quad_on_ray()
    svals = np.linspace(-4, 4, 33)[:, None]
    vec = f.fenchel_many(svals)
    for s, v in zip(svals, vec):
        assert f.fenchel(s) == v


def test_sum_collapse():
    total = SumFunction([quad_on_ray(), Affine([2.0], 1.0), Indicator(interval_set(hi=1.0))])
    c = total.collapse()
    assert isinstance(c, QuadraticRestricted)
    assert c.evaluate([0.5]) == total.evaluate([0.5]) == 0.25 + 2.0
    assert c.fenchel([3.0]) == total.fenchel([3.0])
    lo, lo_s, hi, hi_s = c.dom.interval()
    assert (lo, hi) == (0.0, 1.0)


def test_econvex_flags():
    assert Affine([1.0], 0.0).is_econvex
    assert Indicator(interval_set(0.0, lo_strict=True)).is_econvex
    assert quad_on_ray().is_econvex  # certified explicitly
    # closed domains are lower semicontinuous hence evenly convex
    assert QuadraticRestricted([[1.0]], [0.0], 0.0, interval_set(0.0)).is_econvex
    assert not QuadraticRestricted([[1.0]], [0.0], 0.0, interval_set(0.0, lo_strict=True)).is_econvex
    assert XLogXOverY().is_econvex


def test_grid_mode_membership_margins():
    grid_pol = TolerancePolicy.grid(eq_tol=1e-6, strict_margin=1e-3)
    ray = interval_set(0.0, lo_strict=True)
    assert not ray.member([5e-4], grid_pol)  # inside, but not by the margin
    assert ray.member([5e-3], grid_pol)
