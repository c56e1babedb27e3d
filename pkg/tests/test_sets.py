import numpy as np
import pytest

from econv.extreal import INF
from econv.repro import epigraph_of_linear_halfline
from econv.sets import (
    EmptySetError,
    FlaggedConvexSet,
    PointNotInSetError,
    hull_halfspaces,
    interval_set,
    normal_cone_member,
    strictly_separates,
    support,
    support_with_points,
    whole_space,
)
from econv.spaces import XHalfspace


def halfplane(normal, level, strict=True):
    return FlaggedConvexSet([XHalfspace(np.asarray(normal, dtype=float), level, strict)], dim=2)


def test_membership_respects_flags():
    assert not interval_set(0.0, lo_strict=True).member([0.0])
    assert interval_set(0.0).member([0.0])
    assert not halfplane([1.0, 1.0], 2.0).member([1.0, 1.0])
    assert halfplane([1.0, 1.0], 2.0).member([0.5, 0.5])


def test_support_open_halfline():
    sv = support(interval_set(0.0, lo_strict=True), [-1.0])
    assert sv.value == 0.0 and not sv.attained


def test_support_closed_interval():
    sv = support(interval_set(0.0, 1.0), [1.0])
    assert sv.value == 1.0 and sv.attained


def test_support_open_halfplane_diagonal():
    sv = support(halfplane([1.0, 1.0], 2.0), [1.0, 1.0])
    assert sv.value == 2.0 and not sv.attained


def test_support_unbounded_directions():
    sv = support(halfplane([1.0, 1.0], 2.0), [1.0, 0.0])
    assert sv.value == INF and not sv.attained
    assert support(whole_space(1), [3.0]).value == INF


def test_support_zero_direction_and_empty_set():
    sv = support(interval_set(0.0, 1.0), [0.0])
    assert sv.value == 0.0 and sv.attained
    empty = interval_set(1.0, 0.0)
    assert empty.is_empty()
    with pytest.raises(EmptySetError):
        support(empty, [1.0])
    assert not empty.member([0.5])


def test_emptiness_via_strict_boundary_2d():
    # closure collapses onto the boundary line of a strict constraint
    squeezed = FlaggedConvexSet(
        [
            XHalfspace([1.0, 0.0], 0.0, False),
            XHalfspace([-1.0, 0.0], 0.0, False),
            XHalfspace([1.0, 0.0], 0.0, True),
        ],
        dim=2,
    )
    assert squeezed.is_empty()


def test_support_polygon_vertex_and_open_face():
    # triangle with one open edge
    tri = FlaggedConvexSet(
        [
            XHalfspace([1.0, 0.0], 1.0, False),
            XHalfspace([0.0, 1.0], 1.0, False),
            XHalfspace([-1.0, -1.0], 0.0, True),  # x + y > 0
        ],
        dim=2,
    )
    sv = support(tri, [1.0, 1.0])
    assert sv.value == 2.0 and sv.attained  # corner (1, 1) is closed
    sv = support(tri, [-1.0, -1.0])
    assert sv.value == 0.0 and not sv.attained  # open edge


def test_support_slab_face():
    slab = FlaggedConvexSet(
        [XHalfspace([1.0, 0.0], 1.0, False), XHalfspace([-1.0, 0.0], 0.0, False)], dim=2
    )
    sv = support(slab, [1.0, 0.0])
    assert sv.value == 1.0 and sv.attained
    assert support(slab, [0.0, 1.0]).value == INF


def test_support_grid_oracle_agreement():
    rng = np.random.default_rng(11)
    for _ in range(25):
        hs = []
        for _ in range(rng.integers(1, 4)):
            n = rng.normal(size=2)
            hs.append(XHalfspace(n, float(rng.uniform(0.5, 2.0)), bool(rng.random() < 0.5)))
        cset = FlaggedConvexSet(hs, dim=2)
        if cset.is_empty():
            continue
        d = rng.normal(size=2)
        sv = support(cset, d)
        xs = rng.uniform(-30, 30, size=(4000, 2))
        inside = cset.member_many(xs)
        if not inside.any():
            continue
        sampled = float(np.max(xs[inside] @ d))
        assert sampled <= sv.value + 1e-9


def test_strict_separation_from_epigraph():
    epi = epigraph_of_linear_halfline()
    d = strictly_separates(epi, [0.0, 2.0])
    assert d is not None and np.allclose(d, [-1.0, 0.0])
    assert strictly_separates(epi, [1.0, 1.0]) is None
    d = strictly_separates(interval_set(0.0, 1.0), [2.0])
    assert d is not None and d[0] > 0


def test_separation_certificates_on_random_sets():
    rng = np.random.default_rng(5)
    for _ in range(30):
        hs = [
            XHalfspace(rng.normal(size=2), float(rng.uniform(0.5, 2.0)), bool(rng.random() < 0.5))
            for _ in range(rng.integers(1, 4))
        ]
        cset = FlaggedConvexSet(hs, dim=2)
        if cset.is_empty():
            continue
        x0 = rng.uniform(-10, 10, size=2)
        d = strictly_separates(cset, x0)
        pts = rng.uniform(-30, 30, size=(3000, 2))
        members = pts[cset.member_many(pts)]
        if d is None:
            assert cset.member(x0)
            continue
        if len(members):
            assert np.max((members - x0) @ d) < 0


def test_normal_cone_membership():
    ray = interval_set(0.0, lo_strict=True)
    assert normal_cone_member(ray, [1.0], [0.0])
    assert not normal_cone_member(ray, [1.0], [-1.0])
    with pytest.raises(PointNotInSetError):
        normal_cone_member(ray, [0.0], [0.0])
    box = FlaggedConvexSet(
        [XHalfspace([1.0, 0.0], 1.0, False), XHalfspace([0.0, 1.0], 1.0, False)], dim=2
    )
    assert normal_cone_member(box, [1.0, 1.0], [1.0, 1.0])
    assert not normal_cone_member(box, [1.0, 1.0], [-1.0, 0.0])


def test_normal_cone_oracle_on_wedge_with_origin():
    # domain of the planar entropy model: wedge plus the isolated origin
    from econv.repro import entropy_model

    f = entropy_model()
    u = np.array([-1.0, 0.5])
    sv = f.dom_support(u)
    assert sv.value == 0.0  # the normal-cone inequality holds at the origin
    rng = np.random.default_rng(2)
    pts = rng.uniform(0, 1, size=(5000, 2))
    inside = f.domain().member_many(pts)
    assert np.max(pts[inside] @ u) <= 1e-12


def test_translate_and_intersect():
    iv = interval_set(0.0, 2.0)
    shifted = iv.translate([1.0])
    assert shifted.member([-1.0]) and shifted.member([1.0]) and not shifted.member([1.5])
    both = iv.intersect(interval_set(1.0, 5.0))
    lo, lo_s, hi, hi_s = both.interval()
    assert (lo, hi) == (1.0, 2.0) and not lo_s and not hi_s


def test_support_with_extra_points():
    wedge_like = halfplane([1.0, 1.0], 0.0, True)  # x + y < 0
    sv = support_with_points(wedge_like, [np.zeros(2)], [1.0, 1.0])
    assert sv.value == 0.0 and sv.attained  # the isolated origin attains the sup


def test_hull_halfspaces_contains_inputs():
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(40, 2))
    hull = FlaggedConvexSet(hull_halfspaces(pts), dim=2)
    assert hull.member_many(pts).all()
    centroid = pts.mean(axis=0)
    assert hull.member(centroid)
    far = centroid + 100.0 * np.array([1.0, 1.0])
    assert not hull.member(far)


def test_hull_halfspaces_degenerate():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    hull = FlaggedConvexSet(hull_halfspaces(pts), dim=2)
    assert hull.member([1.5, 1.5])
    assert not hull.member([1.0, 0.0])
    point = FlaggedConvexSet(hull_halfspaces(np.array([[3.0, -1.0]])), dim=2)
    assert point.member([3.0, -1.0]) and not point.member([3.0, 0.0])


def test_set_json_round_trip():
    epi = epigraph_of_linear_halfline()
    back = FlaggedConvexSet.from_json(epi.to_json())
    assert back.member([1.0, 1.0]) and not back.member([0.0, 1.0])
