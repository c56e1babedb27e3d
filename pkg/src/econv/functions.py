"""Extended-real-valued function models on R^n (n <= 2).

The catalog covers affine functions, convex quadratics restricted to a
flagged domain, indicators of flagged sets, the planar entropy-type model
x*ln(x/y) on its standard wedge, grid-sampled functions, and finite sums.
Every model is immutable, proper by construction (at least one finite
value and never -inf), and exposes

* exact evaluation and an exact flagged effective domain,
* vectorized evaluation over node arrays (the grid kernels' food),
* a closed-form convex conjugate where one exists (``fenchel``), and
* attainment-aware support of the effective domain (``dom_support``),
  which accounts for isolated domain points the flagged set cannot carry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extreal import INF, TolerancePolicy, EXACT
from .grids import GridSpec, ensure_budget
from .sets import (
    FlaggedConvexSet,
    SupportValue,
    hull_halfspaces,
    interval_set,
    support_with_points,
    whole_space,
)
from .spaces import XHalfspace, as_point

__all__ = [
    "ExactUnavailable",
    "ImproperFunctionError",
    "FunctionModel",
    "Affine",
    "QuadraticRestricted",
    "Indicator",
    "XLogXOverY",
    "GridFunction",
    "SumFunction",
    "standard_wedge",
    "grid_sample",
]


class ExactUnavailable(Exception):
    """No closed-form conjugate for this model; use the grid path."""


class ImproperFunctionError(ValueError):
    pass


class FunctionModel:
    """Common surface of all catalog variants."""

    dim: int

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        raise NotImplementedError

    def evaluate_many(self, pts: np.ndarray, policy: TolerancePolicy = EXACT) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        return np.array([self.evaluate(p, policy) for p in pts])

    # -- effective domain ------------------------------------------------------

    def domain(self) -> FlaggedConvexSet:
        raise NotImplementedError

    def dom_extra_points(self) -> tuple:
        """Isolated domain points not representable by the flagged set."""
        return ()

    def dom_member(self, x, policy: TolerancePolicy = EXACT) -> bool:
        if self.domain().member(x, policy):
            return True
        x = as_point(x, self.dim)
        return any(np.array_equal(x, as_point(p, self.dim)) for p in self.dom_extra_points())

    def dom_support(self, d, policy: TolerancePolicy = EXACT) -> SupportValue:
        return support_with_points(self.domain(), self.dom_extra_points(), d, policy)

    # -- conjugation hooks -----------------------------------------------------

    @property
    def fenchel_exact_available(self) -> bool:
        return False

    def fenchel(self, s, policy: TolerancePolicy = EXACT) -> float:
        raise ExactUnavailable(type(self).__name__)

    def fenchel_many(self, svals: np.ndarray, policy: TolerancePolicy = EXACT) -> np.ndarray:
        return np.array([self.fenchel(s, policy) for s in np.asarray(svals, dtype=float)])

    @property
    def is_econvex(self) -> bool:
        return False

    def default_grid(self) -> GridSpec:
        raise NotImplementedError

    def dual_candidates(self) -> list:
        """Dual vectors worth probing when scanning conjugate differences."""
        return [np.zeros(self.dim)]

    # -- misc -------------------------------------------------------------------

    def _check_proper(self) -> None:
        if self.domain().is_empty() and not self.dom_extra_points():
            raise ImproperFunctionError("effective domain is empty")


def _box_around(dom: FlaggedConvexSet, pad: float = 5.0, cap: float = 10.0):
    """A bounded sampling box covering the domain up to +-cap per axis."""
    out = []
    for i in range(dom.dim):
        e = np.zeros(dom.dim)
        e[i] = 1.0
        try:
            hi = dom.support(e).value
        except Exception:
            hi = INF
        try:
            lo = -dom.support(-e).value
        except Exception:
            lo = -INF
        lo = max(lo if np.isfinite(lo) else -cap, -cap)
        hi = min(hi if np.isfinite(hi) else cap, cap)
        if lo > hi:
            lo, hi = hi, lo
        if lo == hi:
            lo, hi = lo - 1.0, hi + 1.0
        out.append((lo, hi))
    return tuple(out)


# ---------------------------------------------------------------------------
# affine
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Affine(FunctionModel):
    """f(x) = <a, x> + b on all of R^n."""

    a: np.ndarray
    b: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        return float(np.dot(as_point(x, self.dim), self.a) + self.b)

    def evaluate_many(self, pts, policy: TolerancePolicy = EXACT) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.a + self.b

    def domain(self) -> FlaggedConvexSet:
        return whole_space(self.dim)

    @property
    def fenchel_exact_available(self) -> bool:
        return True

    def fenchel(self, s, policy: TolerancePolicy = EXACT) -> float:
        s = as_point(s, self.dim)
        if policy.is_exact:
            hit = bool(np.all(s == self.a))
        else:
            hit = bool(np.all(np.abs(s - self.a) <= policy.eq_tol))
        return -self.b if hit else INF

    def fenchel_many(self, svals, policy: TolerancePolicy = EXACT) -> np.ndarray:
        svals = np.atleast_2d(np.asarray(svals, dtype=float))
        if policy.is_exact:
            hit = np.all(svals == self.a, axis=1)
        else:
            hit = np.all(np.abs(svals - self.a) <= policy.eq_tol, axis=1)
        return np.where(hit, -self.b, INF)

    @property
    def is_econvex(self) -> bool:
        return True

    def default_grid(self) -> GridSpec:
        return GridSpec([(-5.0, 5.0)] * self.dim, 0.01 if self.dim == 1 else 0.05)

    def dual_candidates(self) -> list:
        return [np.array(self.a), np.zeros(self.dim)]


# ---------------------------------------------------------------------------
# restricted convex quadratic
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadraticRestricted(FunctionModel):
    """f(x) = x^T Q x + <b, x> + cst on dom, +inf elsewhere; Q PSD."""

    Q: np.ndarray
    b: np.ndarray
    cst: float
    dom: FlaggedConvexSet
    econvex: bool | None = None

    def __post_init__(self) -> None:
        q = np.asarray(self.Q, dtype=float)
        q = np.atleast_2d(q)
        q = 0.5 * (q + q.T)
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "b", as_point(self.b, dim=q.shape[0]))
        object.__setattr__(self, "cst", float(self.cst))
        if q.shape[0] != q.shape[1] or q.shape[0] != self.dom.dim:
            raise ValueError("Q / b / dom dimensions disagree")
        if np.min(np.linalg.eigvalsh(q)) < -1e-12:
            raise ValueError("Q must be positive semidefinite")
        self._check_proper()

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def _quad(self, x: np.ndarray) -> float:
        return float(x @ self.Q @ x + np.dot(self.b, x) + self.cst)

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        pt = as_point(x, self.dim)
        if not self.dom.member(pt, policy):
            return INF
        return self._quad(pt)

    def evaluate_many(self, pts, policy: TolerancePolicy = EXACT) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        inside = self.dom.member_many(pts, policy)
        vals = np.einsum("ij,jk,ik->i", pts, self.Q, pts) + pts @ self.b + self.cst
        return np.where(inside, vals, INF)

    def domain(self) -> FlaggedConvexSet:
        return self.dom

    @property
    def fenchel_exact_available(self) -> bool:
        if self.dim == 1:
            return True
        if not np.any(self.Q):
            return True
        return bool(np.linalg.det(self.Q) > 1e-12 and np.trace(self.Q) > 0)

    def fenchel(self, s, policy: TolerancePolicy = EXACT) -> float:
        s = as_point(s, self.dim)
        if not np.any(self.Q):
            sv = self.dom.support(s - self.b, policy)
            return sv.value - self.cst if np.isfinite(sv.value) else INF
        if self.dim == 1:
            return float(self.fenchel_many(s[None, :], policy)[0])
        return self._fenchel_2d(s)

    def fenchel_many(self, svals, policy: TolerancePolicy = EXACT) -> np.ndarray:
        svals = np.atleast_2d(np.asarray(svals, dtype=float))
        if self.dim == 1 and np.any(self.Q):
            q = float(self.Q[0, 0])
            bb = float(self.b[0])
            lo, _, hi, _ = self.dom.interval()
            s = svals[:, 0]
            xc = np.clip((s - bb) / (2.0 * q), lo, hi)
            return s * xc - (q * xc * xc + bb * xc + self.cst)
        return super().fenchel_many(svals, policy)

    def _fenchel_2d(self, s: np.ndarray) -> float:
        target = s - self.b
        xhat = np.linalg.solve(2.0 * self.Q, target)
        closure = FlaggedConvexSet(
            [XHalfspace(h.normal, h.level, False) for h in self.dom.halfspaces], dim=2
        )
        if closure.member(xhat):
            return float(np.dot(s, xhat) - self._quad(xhat))
        best = -INF
        cons = [(h.normal, h.level) for h in self.dom.halfspaces if not h.is_degenerate()]
        for i, (a, lvl) in enumerate(cons):
            nn = float(np.dot(a, a))
            p = a * (lvl / nn)
            e = np.array([-a[1], a[0]]) / math.sqrt(nn)
            # 1-d concave quadratic along the constraint line
            c2 = -float(e @ self.Q @ e)
            c1 = float(np.dot(s - self.b, e) - 2.0 * (p @ self.Q @ e))
            tlo, thi = -INF, INF
            for j, (a2, lvl2) in enumerate(cons):
                if j == i:
                    continue
                ce = float(np.dot(a2, e))
                rhs = lvl2 - float(np.dot(a2, p))
                if ce > 1e-14:
                    thi = min(thi, rhs / ce)
                elif ce < -1e-14:
                    tlo = max(tlo, rhs / ce)
                elif rhs < 0:
                    tlo, thi = 1.0, 0.0  # line misses the closure
                    break
            if tlo > thi:
                continue
            if c2 < 0:
                t = np.clip(-c1 / (2.0 * c2), tlo, thi)
            else:
                t = thi if c1 > 0 else tlo
            if not np.isfinite(t):
                return INF
            xc = p + t * e
            best = max(best, float(np.dot(s, xc) - self._quad(xc)))
        return best

    @property
    def is_econvex(self) -> bool:
        if self.econvex is not None:
            return self.econvex
        return self.dom.all_closed()

    def default_grid(self) -> GridSpec:
        box = _box_around(self.dom)
        return GridSpec(box, 0.001 if self.dim == 1 else 0.01)

    def dual_candidates(self) -> list:
        box = _box_around(self.dom, cap=3.0)
        mids = np.array([0.5 * (lo + hi) for lo, hi in box])
        return [np.array(self.b), np.zeros(self.dim), 2.0 * self.Q @ mids + self.b]


# ---------------------------------------------------------------------------
# indicator
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Indicator(FunctionModel):
    """0 on the flagged set, +inf off it."""

    dom: FlaggedConvexSet

    def __post_init__(self) -> None:
        self._check_proper()

    @property
    def dim(self) -> int:
        return self.dom.dim

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        return 0.0 if self.dom.member(x, policy) else INF

    def evaluate_many(self, pts, policy: TolerancePolicy = EXACT) -> np.ndarray:
        inside = self.dom.member_many(np.asarray(pts, dtype=float), policy)
        return np.where(inside, 0.0, INF)

    def domain(self) -> FlaggedConvexSet:
        return self.dom

    @property
    def fenchel_exact_available(self) -> bool:
        return True

    def fenchel(self, s, policy: TolerancePolicy = EXACT) -> float:
        return self.dom.support(s, policy).value

    @property
    def is_econvex(self) -> bool:
        return True

    def default_grid(self) -> GridSpec:
        return GridSpec(_box_around(self.dom), 0.001 if self.dim == 1 else 0.02)


# ---------------------------------------------------------------------------
# planar entropy-type model
# ---------------------------------------------------------------------------


def standard_wedge() -> FlaggedConvexSet:
    """{(x, y) : x <= 1, y <= x, y > 0} -- the model's flagged domain."""
    return FlaggedConvexSet(
        [
            XHalfspace(np.array([1.0, 0.0]), 1.0, False),
            XHalfspace(np.array([-1.0, 1.0]), 0.0, False),
            XHalfspace(np.array([0.0, -1.0]), 0.0, True),
        ],
        dim=2,
    )


@dataclass(frozen=True, eq=False)
class XLogXOverY(FunctionModel):
    """f(x, y) = x ln(x / y) on the wedge; optionally f(0, 0) = 0.

    The isolated origin is not a halfspace intersection, so ``domain()``
    returns the wedge while membership, evaluation and domain support
    account for the origin separately.
    """

    dom: FlaggedConvexSet = None
    include_origin: bool = True
    econvex: bool = True

    def __post_init__(self) -> None:
        if self.dom is None:
            object.__setattr__(self, "dom", standard_wedge())
        if self.dom.dim != 2:
            raise ValueError("model lives on R^2")
        self._check_proper()

    @property
    def dim(self) -> int:
        return 2

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        pt = as_point(x, 2)
        if self.include_origin and pt[0] == 0.0 and pt[1] == 0.0:
            return 0.0
        if not self.dom.member(pt, policy):
            return INF
        return float(pt[0] * math.log(pt[0] / pt[1]))

    def evaluate_many(self, pts, policy: TolerancePolicy = EXACT) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        inside = self.dom.member_many(pts, policy)
        x = pts[:, 0]
        y = pts[:, 1]
        safe_x = np.where(inside & (x > 0), x, 1.0)
        safe_y = np.where(inside & (y > 0), y, 1.0)
        vals = np.where(inside, safe_x * np.log(safe_x / safe_y), INF)
        # x = 0 inside the wedge cannot happen (y > 0 and y <= x force x > 0)
        if self.include_origin:
            at_origin = (x == 0.0) & (y == 0.0)
            vals = np.where(at_origin, 0.0, vals)
        return vals

    def domain(self) -> FlaggedConvexSet:
        return self.dom

    def dom_extra_points(self) -> tuple:
        return (np.zeros(2),) if self.include_origin else ()

    @property
    def is_econvex(self) -> bool:
        return self.econvex

    def default_grid(self) -> GridSpec:
        return GridSpec([(0.0, 1.0), (0.0, 1.0)], 1.0 / 256.0)


# ---------------------------------------------------------------------------
# grid-sampled function
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFunction(FunctionModel):
    """Nearest-node model of sampled values; no interpolation.

    Suprema over the nodes are exact suprema of this model, which keeps
    grid oracles honest.  ``domain()`` is the closed convex hull of the
    finite-valued nodes (a documented approximation).
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        pts = self.grid.points()
        if vals.shape[0] != pts.shape[0]:
            raise ValueError(f"expected {pts.shape[0]} values, got {vals.shape[0]}")
        if np.any(np.isnan(vals)) or np.any(np.isneginf(vals)):
            raise ImproperFunctionError("grid values must avoid NaN and -inf")
        if not np.any(np.isfinite(vals)):
            raise ImproperFunctionError("grid function needs a finite value")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_points", pts)

    @property
    def dim(self) -> int:
        return self.grid.ndim

    def node_points(self) -> np.ndarray:
        return self._points

    def _nearest_index(self, pt: np.ndarray) -> int | None:
        idx = 0
        for i in range(self.dim):
            lo, _ = self.grid.box[i]
            ax = self.grid.axis(i)
            k = int(round((pt[i] - lo) / self.grid.step))
            if k < 0 or k >= ax.shape[0]:
                return None
            if abs(pt[i] - ax[k]) > self.grid.step / 2.0 + 1e-12:
                return None
            idx = idx * ax.shape[0] + k
        return idx

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        pt = as_point(x, self.dim)
        idx = self._nearest_index(pt)
        return INF if idx is None else float(self.values[idx])

    def evaluate_many(self, pts, policy: TolerancePolicy = EXACT) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = np.full(pts.shape[0], INF)
        idx = np.zeros(pts.shape[0], dtype=np.int64)
        ok = np.ones(pts.shape[0], dtype=bool)
        for i in range(self.dim):
            lo, _ = self.grid.box[i]
            ax = self.grid.axis(i)
            k = np.round((pts[:, i] - lo) / self.grid.step).astype(np.int64)
            ok &= (k >= 0) & (k < ax.shape[0])
            kc = np.clip(k, 0, ax.shape[0] - 1)
            ok &= np.abs(pts[:, i] - ax[kc]) <= self.grid.step / 2.0 + 1e-12
            idx = idx * ax.shape[0] + kc
        out[ok] = self.values[idx[ok]]
        return out

    def domain(self) -> FlaggedConvexSet:
        finite = self._points[np.isfinite(self.values)]
        if self.dim == 1:
            return interval_set(float(finite.min()), float(finite.max()))
        return FlaggedConvexSet(hull_halfspaces(finite), dim=2)

    @property
    def fenchel_exact_available(self) -> bool:
        return True

    def fenchel(self, s, policy: TolerancePolicy = EXACT) -> float:
        from . import _kernels

        s = as_point(s, self.dim)
        val, _ = _kernels.coupling_sup(self._points, self.values, s, np.zeros(self.dim), 1.0, 0.0)
        return val

    def default_grid(self) -> GridSpec:
        return self.grid


# ---------------------------------------------------------------------------
# finite sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SumFunction(FunctionModel):
    """Pointwise sum of catalog models (the only combinator)."""

    terms: tuple

    def __init__(self, terms):
        terms = tuple(terms)
        if not terms:
            raise ValueError("sum needs at least one term")
        d = terms[0].dim
        if any(t.dim != d for t in terms):
            raise ValueError("terms must share a dimension")
        object.__setattr__(self, "terms", terms)
        self._check_proper()

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def evaluate(self, x, policy: TolerancePolicy = EXACT) -> float:
        total = 0.0
        for t in self.terms:
            v = t.evaluate(x, policy)
            if v == INF:
                return INF
            total += v
        return total

    def evaluate_many(self, pts, policy: TolerancePolicy = EXACT) -> np.ndarray:
        total = self.terms[0].evaluate_many(pts, policy)
        for t in self.terms[1:]:
            total = total + t.evaluate_many(pts, policy)
        return total

    def domain(self) -> FlaggedConvexSet:
        dom = self.terms[0].domain()
        for t in self.terms[1:]:
            dom = dom.intersect(t.domain())
        return dom

    def dom_extra_points(self) -> tuple:
        pts = []
        for t in self.terms:
            for p in t.dom_extra_points():
                if all(o.dom_member(p) for o in self.terms):
                    pts.append(p)
        return tuple(pts)

    def collapse(self) -> QuadraticRestricted | None:
        """Fold affine/quadratic/indicator terms into one quadratic model."""
        q = np.zeros((self.dim, self.dim))
        b = np.zeros(self.dim)
        cst = 0.0
        dom = whole_space(self.dim)
        for t in self.terms:
            if isinstance(t, Affine):
                b = b + t.a
                cst += t.b
            elif isinstance(t, QuadraticRestricted):
                q = q + t.Q
                b = b + t.b
                cst += t.cst
                dom = dom.intersect(t.dom)
            elif isinstance(t, Indicator):
                dom = dom.intersect(t.dom)
            else:
                return None
        return QuadraticRestricted(q, b, cst, dom, econvex=self.is_econvex)

    @property
    def fenchel_exact_available(self) -> bool:
        c = self.collapse()
        return c is not None and c.fenchel_exact_available

    def fenchel(self, s, policy: TolerancePolicy = EXACT) -> float:
        c = self.collapse()
        if c is None:
            raise ExactUnavailable("sum does not collapse")
        return c.fenchel(s, policy)

    @property
    def is_econvex(self) -> bool:
        # finite sums of evenly convex functions on R^n stay evenly convex
        return all(t.is_econvex for t in self.terms)

    def default_grid(self) -> GridSpec:
        box = _box_around(self.domain())
        return GridSpec(box, 0.001 if self.dim == 1 else 0.02)

    def dual_candidates(self) -> list:
        out = []
        for t in self.terms:
            out.extend(t.dual_candidates())
        return out


def grid_sample(f: FunctionModel, box, step: float, max_nodes: int = 10_000_000,
                policy: TolerancePolicy = EXACT) -> GridFunction:
    """Sample a model on a box; node values are exact, +inf preserved."""
    spec = GridSpec(box, step)
    if spec.ndim != f.dim:
        raise ValueError("box dimension mismatch")
    ensure_budget(spec.n_nodes(), max_nodes)
    vals = f.evaluate_many(spec.points(), policy)
    return GridFunction(spec, vals)
