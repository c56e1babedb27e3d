"""Finitely-flagged convex sets: membership, support with attainment,
strict separation, and normal cones on R^n (n <= 2).

A set is stored as a finite intersection of halfspaces, each flagged strict
(open) or non-strict (closed).  Every such set is evenly convex by
construction, and every outside point admits a strict linear separator read
off a violated constraint.

Support values are computed exactly for this representation: the supremum
over the closure comes from vertex / slab / recession-ray enumeration and
attainment is decided by testing a relative-interior point of the optimal
face against the strict flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extreal import INF, NEG_INF, TolerancePolicy, EXACT
from .spaces import XHalfspace, as_point

__all__ = [
    "GeometryError",
    "EmptySetError",
    "PointNotInSetError",
    "SeparationInconclusive",
    "SupportValue",
    "FlaggedConvexSet",
    "member",
    "support",
    "support_with_points",
    "strictly_separates",
    "normal_cone_member",
    "whole_space",
    "interval_set",
    "hull_halfspaces",
]

# Relative slack absorbing float round-off in vertex solves; it is far below
# the geometric gaps of any well-posed instance and is not a policy tolerance.
_FP_SLACK = 1e-12
_TIGHT_TOL = 1e-9


class GeometryError(Exception):
    pass


class EmptySetError(GeometryError):
    pass


class PointNotInSetError(GeometryError):
    pass


class SeparationInconclusive(GeometryError):
    pass


@dataclass(frozen=True)
class SupportValue:
    """sup of <x, d> over a set, plus whether the sup is attained in it."""

    value: float
    attained: bool

    def __post_init__(self) -> None:
        if self.attained and not np.isfinite(self.value):
            raise ValueError("an attained support value must be finite")


def _rot90(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


@dataclass(frozen=True, eq=False)
class FlaggedConvexSet:
    """Intersection of flagged halfspaces; an empty list denotes all of R^n."""

    halfspaces: tuple
    dim: int

    def __init__(self, halfspaces, dim: int | None = None):
        hs = tuple(halfspaces)
        if dim is None:
            if not hs:
                raise ValueError("dim is required for an unconstrained set")
            dim = hs[0].dim
        if dim not in (1, 2):
            raise ValueError(f"only dimensions 1 and 2 are supported, got {dim}")
        for h in hs:
            if h.dim != dim:
                raise ValueError("halfspace dimension mismatch")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "dim", dim)

    # -- basic structure ---------------------------------------------------

    def _real(self):
        """Constraints with nonzero normals, as (normal, level, strict)."""
        return [(h.normal, h.level, h.strict) for h in self.halfspaces if not h.is_degenerate()]

    def _degenerate_empty(self) -> bool:
        for h in self.halfspaces:
            if h.is_degenerate():
                ok = (0.0 < h.level) if h.strict else (0.0 <= h.level)
                if not ok:
                    return True
        return False

    def member(self, x, policy: TolerancePolicy = EXACT) -> bool:
        pt = as_point(x, self.dim)
        return all(h.contains(pt, policy) for h in self.halfspaces)

    def member_many(self, pts: np.ndarray, policy: TolerancePolicy = EXACT) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        out = np.ones(pts.shape[0], dtype=bool)
        for h in self.halfspaces:
            out &= h.contains_many(pts, policy)
        return out

    def translate(self, x0) -> "FlaggedConvexSet":
        """The set C - x0."""
        x0 = as_point(x0, self.dim)
        return FlaggedConvexSet(
            [XHalfspace(h.normal, h.level - float(np.dot(h.normal, x0)), h.strict) for h in self.halfspaces],
            dim=self.dim,
        )

    def intersect(self, other: "FlaggedConvexSet") -> "FlaggedConvexSet":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return FlaggedConvexSet(self.halfspaces + other.halfspaces, dim=self.dim)

    def all_closed(self) -> bool:
        return all(not h.strict for h in self.halfspaces)

    # -- interval view (n = 1) ----------------------------------------------

    def interval(self):
        """(lo, lo_strict, hi, hi_strict) for n = 1."""
        if self.dim != 1:
            raise ValueError("interval view requires dim 1")
        lo, lo_strict = NEG_INF, False
        hi, hi_strict = INF, False
        for normal, level, strict in self._real():
            a = normal[0]
            bound = level / a
            if a > 0:
                if bound < hi or (bound == hi and strict):
                    hi, hi_strict = bound, strict
            else:
                if bound > lo or (bound == lo and strict):
                    lo, lo_strict = bound, strict
        return lo, lo_strict, hi, hi_strict

    # -- emptiness -----------------------------------------------------------

    def is_empty(self) -> bool:
        if self._degenerate_empty():
            return True
        if self.dim == 1:
            lo, lo_s, hi, hi_s = self.interval()
            if lo > hi:
                return True
            return lo == hi and (lo_s or hi_s)
        cons = self._real()
        feasible, _ = _closed_feasible_2d(cons)
        if not feasible:
            return True
        # the flagged set is empty iff the closure lies inside the boundary
        # hyperplane of some strict constraint
        for normal, level, strict in cons:
            if not strict:
                continue
            sigma = _closed_support_2d(cons, -normal)[0]
            scale = max(1.0, abs(level))
            if sigma <= -level + _FP_SLACK * scale:
                return True
        return False

    # -- support -------------------------------------------------------------

    def support(self, d, policy: TolerancePolicy = EXACT) -> SupportValue:
        if self.is_empty():
            raise EmptySetError("support of an empty set")
        d = as_point(d, self.dim)
        if not np.any(d):
            return SupportValue(0.0, True)
        if self.dim == 1:
            return self._support_1d(float(d[0]))
        return self._support_2d(d)

    def _support_1d(self, d: float) -> SupportValue:
        lo, lo_s, hi, hi_s = self.interval()
        if d > 0:
            if hi == INF:
                return SupportValue(INF, False)
            return SupportValue(d * hi, not hi_s)
        if lo == NEG_INF:
            return SupportValue(INF, False)
        return SupportValue(d * lo, not lo_s)

    def _support_2d(self, d: np.ndarray) -> SupportValue:
        cons = self._real()
        normals = [c[0] for c in cons]
        # unbounded? test the direction itself and every constraint-edge ray;
        # dot products carry FMA dust, so cone membership is dust-tolerant
        rays = [d]
        for a in normals:
            e = _rot90(a)
            rays.append(e)
            rays.append(-e)
        d_nrm = float(np.hypot(d[0], d[1]))
        for r in rays:
            r_nrm = float(np.hypot(r[0], r[1]))
            if r_nrm == 0.0 or float(np.dot(d, r)) <= _FP_SLACK * d_nrm * r_nrm:
                continue
            if all(
                float(np.dot(a, r)) <= _FP_SLACK * float(np.hypot(a[0], a[1])) * r_nrm
                for a in normals
            ):
                return SupportValue(INF, False)
        if not cons:
            return SupportValue(INF, False)  # unreachable: r = d fires above
        if _all_parallel(normals):
            return self._support_slab(cons, d)
        sigma = NEG_INF
        for v in _vertices_2d(cons):
            val = float(np.dot(d, v))
            if val > sigma:
                sigma = val
        if sigma == NEG_INF:
            raise GeometryError("support enumeration found no feasible vertex")
        point = _face_relint_point(cons, d, sigma)
        return SupportValue(sigma, self._strictly_inside(point))

    def _support_slab(self, cons, d: np.ndarray) -> SupportValue:
        a0 = cons[0][0]
        axis = a0 / float(np.hypot(a0[0], a0[1]))
        ylo, yhi = NEG_INF, INF
        for a, b, _ in cons:
            s = float(np.dot(a, axis))
            bound = b / s
            if s > 0:
                yhi = min(yhi, bound)
            else:
                ylo = max(ylo, bound)
        t = float(np.dot(d, axis))
        ybest = yhi if t > 0 else ylo
        if not np.isfinite(ybest):
            return SupportValue(INF, False)
        point = axis * ybest
        return SupportValue(t * ybest, self._strictly_inside(point))

    def _strictly_inside(self, point: np.ndarray) -> bool:
        """Point satisfies every strict constraint with a clear margin."""
        for normal, level, strict in self._real():
            if not strict:
                continue
            val = float(np.dot(normal, point))
            scale = max(1.0, abs(val), abs(level))
            if val >= level - _TIGHT_TOL * scale:
                return False
        return True

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"dim": self.dim, "halfspaces": [h.to_json() for h in self.halfspaces]}

    @classmethod
    def from_json(cls, data: dict) -> "FlaggedConvexSet":
        return cls([XHalfspace.from_json(h) for h in data["halfspaces"]], dim=int(data["dim"]))

    def __repr__(self) -> str:
        return f"FlaggedConvexSet({len(self.halfspaces)} halfspaces, dim={self.dim})"


# ---------------------------------------------------------------------------
# closed-polyhedron helpers (2D)
# ---------------------------------------------------------------------------


def _all_parallel(normals) -> bool:
    if len(normals) < 2:
        return True
    a0 = normals[0]
    s0 = float(np.hypot(a0[0], a0[1]))
    return all(
        abs(a0[0] * a[1] - a0[1] * a[0]) <= _FP_SLACK * s0 * float(np.hypot(a[0], a[1]))
        for a in normals[1:]
    )


def _closed_ok(cons, v) -> bool:
    for a, b, _ in cons:
        val = float(np.dot(a, v))
        scale = max(1.0, abs(val), abs(b))
        if val > b + _FP_SLACK * scale:
            return False
    return True


def _vertices_2d(cons):
    verts = []
    m = len(cons)
    for i in range(m):
        ai, bi, _ = cons[i]
        si = float(np.hypot(ai[0], ai[1]))
        for j in range(i + 1, m):
            aj, bj, _ = cons[j]
            det = ai[0] * aj[1] - ai[1] * aj[0]
            if abs(det) <= _FP_SLACK * si * float(np.hypot(aj[0], aj[1])):
                continue
            v = np.array([(bi * aj[1] - bj * ai[1]) / det, (ai[0] * bj - aj[0] * bi) / det])
            if _closed_ok(cons, v):
                verts.append(v)
    return verts


def _closed_feasible_2d(cons):
    """Feasibility of the closure; returns (bool, witness point or None)."""
    if not cons:
        return True, np.zeros(2)
    normals = [c[0] for c in cons]
    if _all_parallel(normals):
        a0 = normals[0]
        axis = a0 / float(np.hypot(a0[0], a0[1]))
        ylo, yhi = NEG_INF, INF
        for a, b, _ in cons:
            s = float(np.dot(a, axis))
            bound = b / s
            if s > 0:
                yhi = min(yhi, bound)
            else:
                ylo = max(ylo, bound)
        if ylo > yhi:
            return False, None
        if np.isfinite(ylo) and np.isfinite(yhi):
            y = 0.5 * (ylo + yhi)
        elif np.isfinite(ylo):
            y = ylo + 1.0
        elif np.isfinite(yhi):
            y = yhi - 1.0
        else:
            y = 0.0
        return True, axis * y
    verts = _vertices_2d(cons)
    if verts:
        return True, verts[0]
    return False, None


def _closed_support_2d(cons, d):
    """Support over the closure only; returns (value, None)."""
    dummy = FlaggedConvexSet([XHalfspace(a, b, False) for a, b, _ in cons], dim=2)
    try:
        sv = dummy.support(d)
    except EmptySetError:
        raise
    return sv.value, None


def _face_relint_point(cons, d, sigma):
    """Relative-interior point of {x in closure : <d, x> = sigma}."""
    dd = float(np.dot(d, d))
    p0 = d * (sigma / dd)
    e = _rot90(d)
    tlo, thi = NEG_INF, INF
    for a, b, _ in cons:
        ce = float(np.dot(a, e))
        rhs = b - float(np.dot(a, p0))
        scale = max(1.0, abs(ce))
        if ce > _FP_SLACK * scale:
            thi = min(thi, rhs / ce)
        elif ce < -_FP_SLACK * scale:
            tlo = max(tlo, rhs / ce)
    if np.isfinite(tlo) and np.isfinite(thi):
        t = 0.5 * (tlo + thi)
    elif np.isfinite(tlo):
        t = tlo + 1.0
    elif np.isfinite(thi):
        t = thi - 1.0
    else:
        t = 0.0
    return p0 + t * e


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def member(C: FlaggedConvexSet, x, policy: TolerancePolicy = EXACT) -> bool:
    return C.member(x, policy)


def support(C: FlaggedConvexSet, d, policy: TolerancePolicy = EXACT) -> SupportValue:
    return C.support(d, policy)


def support_with_points(C: FlaggedConvexSet, extra_points, d, policy: TolerancePolicy = EXACT) -> SupportValue:
    """Support of C union a finite point list (isolated domain points)."""
    sv = C.support(d, policy)
    if sv.value == INF:
        return sv
    value, attained = sv.value, sv.attained
    d = as_point(d, C.dim)
    for p in extra_points:
        val = float(np.dot(as_point(p, C.dim), d))
        if val > value:
            value, attained = val, True
        elif val == value:
            attained = True
    return SupportValue(value, attained)


def strictly_separates(C: FlaggedConvexSet, x0, policy: TolerancePolicy = EXACT):
    """Direction x* with <x - x0, x*> < 0 for all x in C, or None if x0 in C.

    The certificate is the normal of a constraint that x0 violates: every
    point of C satisfies the constraint (strictly, if flagged), so the
    inequality is strict.  In GRID mode a boundary-fuzzy point may violate
    nothing by the declared margin; that is reported as inconclusive rather
    than as a failure of even convexity.
    """
    if C.is_empty():
        raise EmptySetError("separation from an empty set")
    x0 = as_point(x0, C.dim)
    if C.member(x0, policy):
        return None
    for h in C.halfspaces:
        if h.is_degenerate():
            continue
        val = float(np.dot(h.normal, x0))
        violated = (val >= h.level) if h.strict else (val > h.level)
        if policy.mode == "GRID":
            margin = policy.margin_at(val, h.level)
            violated = (val >= h.level - margin) if h.strict else (val > h.level + margin)
        if violated:
            return np.array(h.normal, dtype=float)
    raise SeparationInconclusive(
        "point is outside the set but no constraint is violated by the declared margin"
    )


def normal_cone_member(C: FlaggedConvexSet, x0, u, policy: TolerancePolicy = EXACT) -> bool:
    """u in N(C, x0): <x - x0, u> <= 0 for all x in C."""
    x0 = as_point(x0, C.dim)
    if not C.member(x0, policy):
        raise PointNotInSetError("normal cone is defined at points of the set")
    sv = C.translate(x0).support(u, policy)
    return policy.leq(sv.value, 0.0)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def whole_space(dim: int) -> FlaggedConvexSet:
    return FlaggedConvexSet([], dim=dim)


def interval_set(lo=NEG_INF, hi=INF, lo_strict: bool = False, hi_strict: bool = False) -> FlaggedConvexSet:
    """Interval in R^1 with open/closed endpoints; infinite bounds drop."""
    hs = []
    if hi != INF:
        hs.append(XHalfspace(np.array([1.0]), float(hi), hi_strict))
    if lo != NEG_INF:
        hs.append(XHalfspace(np.array([-1.0]), -float(lo), lo_strict))
    return FlaggedConvexSet(hs, dim=1)


def hull_halfspaces(points: np.ndarray) -> list:
    """Closed halfspace description of the convex hull of 2-d points."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] == 1:
        p = pts[0]
        return [
            XHalfspace(np.array([1.0, 0.0]), p[0], False),
            XHalfspace(np.array([-1.0, 0.0]), -p[0], False),
            XHalfspace(np.array([0.0, 1.0]), p[1], False),
            XHalfspace(np.array([0.0, -1.0]), -p[1], False),
        ]
    hull = _monotone_chain(pts)
    if hull is None:  # collinear
        p0 = pts[0]
        v = pts[-1] - p0
        v = v / float(np.hypot(v[0], v[1]))
        nrm = _rot90(v)
        return [
            XHalfspace(nrm, float(np.max(pts @ nrm)), False),
            XHalfspace(-nrm, float(np.max(pts @ -nrm)), False),
            XHalfspace(v, float(np.max(pts @ v)), False),
            XHalfspace(-v, float(np.max(pts @ -v)), False),
        ]
    out = []
    k = len(hull)
    for i in range(k):
        p, q = hull[i], hull[(i + 1) % k]
        edge = q - p
        nrm = np.array([edge[1], -edge[0]])  # outward for a CCW hull
        # the level is the exact support of the point cloud, so every input
        # point is a member of the hull set despite rounding
        out.append(XHalfspace(nrm, float(np.max(pts @ nrm)), False))
    return out


def _monotone_chain(pts: np.ndarray):
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return None
    return [np.asarray(h, dtype=float) for h in hull]
