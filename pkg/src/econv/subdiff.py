"""Coupling subdifferentials and their product structure.

A dual triple w = (x*, u*, alpha) is an eps-subgradient of f at x0 exactly
when f(x0) is finite, the coupling gate <x0, u*> < alpha is open, and

    f(x0) + f^c(w) <= c(x0, w) + eps.

That characterization factors: the x*-part ranges over the classical
eps-subdifferential of f at x0 and the (u*, alpha)-part over the
admissibility cone V(f) = {(u*, alpha) : dom f inside {<., u*> < alpha}}.
Descriptors expose the product intensionally (membership predicates plus
1-d interval extraction by bisection); set inclusions are then decided by
sampling, where a failure is a certified counterexample and a pass is
labeled sampling-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conjugate import (
    ConjugateOf,
    EvalContext,
    DEFAULT_CTX,
    WFunctionModel,
    WGridFunction,
    c_conjugate_flagged,
    c_prime_conjugate,
    fenchel_value,
    vcone_member_of,
)
from .extreal import INF, add_conj
from .functions import Affine, FunctionModel, SumFunction
from .report import FAIL, INCONCLUSIVE, PASS, VACUOUS, Verdict
from .sets import FlaggedConvexSet, SupportValue
from .spaces import DualTriple, as_point, coupling_c

__all__ = [
    "v_cone_member",
    "fenchel_eps_subdiff_member",
    "c_eps_subdiff_member",
    "CSubdiffDescriptor",
    "c_subdiff_descriptor",
    "cprime_subdiff_member",
    "check_conjugate_flip",
    "check_sum_rule",
    "check_subdiff_in_domfc",
    "check_subgradient_bridge",
    "envelope_reconstruct",
    "descriptor_separator",
]

_BISECT_ITERS = 60
_SCAN_LIMIT = 1e12


def _leq(lhs: float, rhs: float, slack: float) -> bool:
    if math.isinf(lhs) or math.isinf(rhs):
        return lhs <= rhs
    return lhs <= rhs + slack


def v_cone_member(dom: FlaggedConvexSet, ustar, alpha: float, policy=None) -> bool:
    """dom inside the open halfspace {<., u*> < alpha}, attainment-aware."""
    from .conjugate import _vcone_from_support
    from .extreal import EXACT

    policy = policy or EXACT
    sv = dom.support(ustar, policy)
    if sv.value == INF:
        return False
    return _vcone_from_support(sv, float(alpha), policy)


def fenchel_eps_subdiff_member(f: FunctionModel, x0, s, eps: float, ctx: EvalContext = DEFAULT_CTX) -> bool:
    """s in the classical eps-subdifferential of f at x0."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x0 = as_point(x0, f.dim)
    s = as_point(s, f.dim)
    fx0 = f.evaluate(x0, ctx.policy)
    if not math.isfinite(fx0):
        return False
    val, closed = fenchel_value(f, s, ctx)
    lhs = add_conj(fx0, val)
    rhs = float(np.dot(x0, s)) + eps
    return _leq(lhs, rhs, ctx.membership_slack(closed))


def c_eps_subdiff_member(f: FunctionModel, x0, w: DualTriple, eps: float, ctx: EvalContext = DEFAULT_CTX) -> bool:
    """w in the eps-coupling-subdifferential of f at x0."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x0 = as_point(x0, f.dim)
    fx0 = f.evaluate(x0, ctx.policy)
    if not math.isfinite(fx0):
        return False
    if not ctx.policy.lt(float(np.dot(x0, w.ustar)), w.alpha):
        return False
    conj, closed = c_conjugate_flagged(f, w, ctx)
    lhs = add_conj(fx0, conj)
    rhs = add_conj(coupling_c(x0, w, ctx.policy), eps)
    return _leq(lhs, rhs, ctx.membership_slack(closed))


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------


@dataclass
class CSubdiffDescriptor:
    """Product-form description of an eps-coupling-subdifferential.

    The x*-factor is intensional (a membership predicate over R^n, with 1-d
    interval endpoints extracted by bisection); the (u*, alpha)-factor is the
    admissibility cone of the effective domain.
    """

    f: FunctionModel
    x0: np.ndarray
    eps: float
    ctx: EvalContext = field(default_factory=EvalContext)
    _base: np.ndarray | None = field(default=None, repr=False)
    _base_searched: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        self.x0 = as_point(self.x0, self.f.dim)
        if self.eps < 0:
            raise ValueError("eps must be non-negative")

    # -- membership ---------------------------------------------------------

    def fenchel_member(self, s, sharp: bool = False) -> bool:
        """x*-factor membership; ``sharp`` drops the EXACT-mode slack so
        extracted endpoints track the ideal boundary instead of its halo."""
        if not sharp or not self.ctx.policy.is_exact:
            return fenchel_eps_subdiff_member(self.f, self.x0, s, self.eps, self.ctx)
        fx0 = self.f.evaluate(self.x0, self.ctx.policy)
        if not math.isfinite(fx0):
            return False
        from .conjugate import fenchel_value

        val, _ = fenchel_value(self.f, s, self.ctx)
        return _leq(add_conj(fx0, val), float(np.dot(self.x0, as_point(s, self.f.dim))) + self.eps, 0.0)

    def vcone_member(self, ustar, alpha: float) -> bool:
        return vcone_member_of(self.f, ustar, alpha, self.ctx.policy)

    def member(self, w: DualTriple) -> bool:
        return c_eps_subdiff_member(self.f, self.x0, w, self.eps, self.ctx)

    @property
    def vcone_dom(self) -> FlaggedConvexSet:
        return self.f.domain()

    @property
    def empty(self) -> bool:
        if not math.isfinite(self.f.evaluate(self.x0, self.ctx.policy)):
            return True
        return self.base_member() is None

    # -- x*-factor extraction -------------------------------------------------

    def base_member(self):
        """Some point of the x*-factor, or None when it is empty."""
        if self._base_searched:
            return self._base
        self._base_searched = True
        n = self.f.dim
        candidates = [np.zeros(n)]
        grad = _gradient_estimate(self.f, self.x0)
        if grad is not None:
            candidates.append(grad)
        for c in self.f.dual_candidates():
            candidates.append(np.asarray(c, dtype=float))
        scan = np.linspace(-8.0, 8.0, 33 if n == 1 else 17)
        if n == 1:
            candidates.extend(np.array([v]) for v in scan)
        else:
            candidates.extend(np.array([a, b]) for a in scan for b in scan)
        for s in candidates:
            if self.fenchel_member(s):
                self._base = np.asarray(s, dtype=float)
                return self._base
        return None

    def interval(self):
        """Endpoints of the 1-d x*-factor, or None when empty (n = 1 only)."""
        if self.f.dim != 1:
            raise ValueError("interval extraction is one-dimensional")
        base = self.base_member()
        if base is None:
            return None
        b = float(base[0])
        hi = self._scan_endpoint(b, +1.0)
        lo = self._scan_endpoint(b, -1.0)
        return lo, hi

    def _scan_endpoint(self, base: float, sign: float) -> float:
        member = lambda v: self.fenchel_member(np.array([v]), sharp=True)
        step = 1.0
        inside = base
        while True:
            cand = inside + sign * step
            if abs(cand) > _SCAN_LIMIT:
                return sign * INF
            if member(cand):
                inside = cand
                step *= 2.0
            else:
                outside = cand
                break
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (inside + outside)
            if member(mid):
                inside = mid
            else:
                outside = mid
        return inside

    # -- sampling ----------------------------------------------------------------

    def sample_fenchel(self, rng: np.random.Generator, k: int) -> list:
        """Members of the x*-factor: endpoints, face points, interior points."""
        base = self.base_member()
        if base is None:
            return []
        out = [np.array(base)]
        if self.f.dim == 1:
            lo, hi = self.interval()
            flo = max(lo, -_SCAN_LIMIT)
            fhi = min(hi, _SCAN_LIMIT)
            if math.isfinite(lo):
                out.append(np.array([lo]))
            if math.isfinite(hi):
                out.append(np.array([hi]))
            span_lo = flo if math.isfinite(lo) else float(base[0]) - 8.0
            span_hi = fhi if math.isfinite(hi) else float(base[0]) + 8.0
            for _ in range(k):
                out.append(np.array([rng.uniform(span_lo, span_hi)]))
            return [s for s in out if self.fenchel_member(s)]
        dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0]) / math.sqrt(2.0),
                np.array([1.0, -1.0]) / math.sqrt(2.0)]
        dirs.extend(-d for d in list(dirs))
        while len(dirs) < max(8, k // 4):
            v = rng.standard_normal(2)
            nrm = float(np.hypot(v[0], v[1]))
            if nrm > 1e-12:
                dirs.append(v / nrm)
        for d in dirs:
            r_hi = self._chord_endpoint(base, d)
            out.append(base + r_hi * d)
            for _ in range(max(1, k // len(dirs))):
                out.append(base + rng.uniform(0.0, r_hi) * d)
        return [s for s in out if self.fenchel_member(s)]

    def _chord_endpoint(self, base: np.ndarray, d: np.ndarray) -> float:
        member = lambda r: self.fenchel_member(base + r * d)
        step, inside = 1.0, 0.0
        while True:
            cand = inside + step
            if cand > _SCAN_LIMIT:
                return inside
            if member(cand):
                inside = cand
                step *= 2.0
            else:
                outside = cand
                break
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (inside + outside)
            if member(mid):
                inside = mid
            else:
                outside = mid
        return inside

    def sample_vcone(self, rng: np.random.Generator, k: int) -> list:
        """Interior members of the admissibility cone, verified one by one.

        Candidate gate normals mix the zero vector, random directions, and
        the domain's own constraint normals (the only directions with finite
        support for unbounded domains such as halfplanes)."""
        n = self.f.dim
        normals = [np.array(h.normal, dtype=float)
                   for h in self.f.domain().halfspaces if not h.is_degenerate()]
        out = []
        tries = 0
        while len(out) < k and tries < 40 * k:
            tries += 1
            if tries % 5 == 0:
                u = np.zeros(n)
            elif normals and tries % 5 == 2:
                u = normals[(tries // 5) % len(normals)] * rng.exponential(1.0)
            else:
                u = rng.standard_normal(n)
            sv = self.f.dom_support(u, self.ctx.policy)
            if sv.value == INF:
                u = -u
                sv = self.f.dom_support(u, self.ctx.policy)
                if sv.value == INF:
                    continue
            alpha = sv.value + rng.exponential(1.0) + 1e-9
            if self.vcone_member(u, alpha):
                out.append((u, float(alpha)))
        return out

    def sample_members(self, rng: np.random.Generator, k: int) -> list:
        """Verified member triples assembled from the two factors."""
        fench = self.sample_fenchel(rng, k)
        if not fench:
            return []
        cone = self.sample_vcone(rng, k)
        if not cone:
            return []
        out = []
        for i in range(k):
            s = fench[i % len(fench)]
            u, a = cone[i % len(cone)]
            w = DualTriple(s, u, a)
            if self.member(w):
                out.append(w)
        return out


def c_subdiff_descriptor(f: FunctionModel, x0, eps: float, ctx: EvalContext = DEFAULT_CTX) -> CSubdiffDescriptor:
    return CSubdiffDescriptor(f, as_point(x0, f.dim), float(eps), ctx)


def _gradient_estimate(f: FunctionModel, x0: np.ndarray):
    h = 1e-5
    grad = np.zeros(f.dim)
    for i in range(f.dim):
        e = np.zeros(f.dim)
        e[i] = h
        fp = f.evaluate(x0 + e)
        fm = f.evaluate(x0 - e)
        f0 = f.evaluate(x0)
        if math.isfinite(fp) and math.isfinite(fm):
            grad[i] = (fp - fm) / (2 * h)
        elif math.isfinite(fp) and math.isfinite(f0):
            grad[i] = (fp - f0) / h
        elif math.isfinite(fm) and math.isfinite(f0):
            grad[i] = (f0 - fm) / h
        else:
            return None
    return grad


# ---------------------------------------------------------------------------
# dual-side subgradients
# ---------------------------------------------------------------------------


def cprime_subdiff_member(g: WFunctionModel, w0: DualTriple, x, ctx: EvalContext = DEFAULT_CTX) -> bool:
    """x a dual subgradient of g at w0, via the conjugate-equality criterion."""
    x = as_point(x, g.dim)
    gval = g.evaluate_w(w0, ctx)
    if not math.isfinite(gval):
        return False
    if not ctx.policy.lt(float(np.dot(x, w0.ustar)), w0.alpha):
        return False
    closed = ctx.policy.is_exact and isinstance(g, ConjugateOf) and g.f.is_econvex
    gc = c_prime_conjugate(g, x, ctx)
    lhs = add_conj(gval, gc)
    rhs = coupling_c(x, w0, ctx.policy)
    # Young's inequality gives lhs >= rhs, so <= certifies the equality
    return _leq(lhs, rhs, ctx.membership_slack(closed))


def check_conjugate_flip(f: FunctionModel, x0, w: DualTriple, ctx: EvalContext = DEFAULT_CTX) -> Verdict:
    """Primal membership must imply dual membership of the conjugate;
    the converse must hold when f is certified evenly convex."""
    x0 = as_point(x0, f.dim)
    primal = c_eps_subdiff_member(f, x0, w, 0.0, ctx)
    dual = cprime_subdiff_member(ConjugateOf(f), w, x0, ctx)
    values = {"primal_member": primal, "dual_member": dual, "econvex": f.is_econvex}
    if primal and not dual:
        return Verdict(FAIL, "forward implication broken", [w], values)
    if f.is_econvex and dual and not primal:
        return Verdict(FAIL, "converse broken for an evenly convex model", [w], values)
    return Verdict(PASS, "flip relation consistent", values=values)


def check_sum_rule(
    f: FunctionModel,
    g: FunctionModel,
    x0,
    eps: float,
    eta: float,
    wf: DualTriple,
    wg: DualTriple,
    ctx: EvalContext = DEFAULT_CTX,
) -> Verdict:
    """Members of the eta- and (eps-eta)-subdifferentials must sum into the
    eps-subdifferential of the sum."""
    if not (0.0 <= eta <= eps + 1e-15):
        raise ValueError("eta must lie in [0, eps]")
    x0 = as_point(x0, f.dim)
    if not (f.dom_member(x0, ctx.policy) and g.dom_member(x0, ctx.policy)):
        return Verdict(VACUOUS, "x0 outside the common domain")
    if not c_eps_subdiff_member(f, x0, wf, eta, ctx):
        return Verdict(VACUOUS, "precondition not met: wf is not an eta-subgradient of f")
    if not c_eps_subdiff_member(g, x0, wg, eps - eta, ctx):
        return Verdict(VACUOUS, "precondition not met: wg is not an (eps-eta)-subgradient of g")
    total = SumFunction([f, g])
    wsum = wf + wg
    if c_eps_subdiff_member(total, x0, wsum, eps, ctx):
        return Verdict(PASS, "sum inclusion holds", values={"w_sum": wsum.as_array()})
    return Verdict(FAIL, "sum of subgradients rejected by the sum model", [wsum])


def check_subdiff_in_domfc(f: FunctionModel, x0, samples, ctx: EvalContext = DEFAULT_CTX) -> Verdict:
    """Every sampled subgradient triple must lie in dom f^c."""
    from .conjugate import dom_fc_member

    x0 = as_point(x0, f.dim)
    if not f.dom_member(x0, ctx.policy):
        raise ValueError("x0 must belong to dom f")
    checked = 0
    for w in samples:
        if c_eps_subdiff_member(f, x0, w, 0.0, ctx):
            checked += 1
            if not dom_fc_member(f, w, ctx):
                return Verdict(FAIL, "subgradient outside dom of the conjugate", [w])
    return Verdict(PASS, "all sampled subgradients lie in dom of the conjugate",
                   values={"members_checked": checked}, label="sampling-based")


def check_subgradient_bridge(
    g: WFunctionModel,
    w0: DualTriple,
    x0,
    ctx: EvalContext = DEFAULT_CTX,
    dom_samples=None,
) -> Verdict:
    """When x0 is a dual subgradient at w0 and every finite-g triple keeps the
    gate <x0, u*> < alpha open, (x0, 0, 0) is a classical subgradient of g."""
    x0 = as_point(x0, g.dim)
    gval = g.evaluate_w(w0, ctx)
    if not math.isfinite(gval):
        return Verdict(VACUOUS, "dual subdifferential is empty at w0")
    samples = dom_samples if dom_samples is not None else _default_w_samples(g, ctx)
    finite = [(w, g.evaluate_w(w, ctx)) for w in samples]
    finite = [(w, v) for w, v in finite if math.isfinite(v)]
    if not finite:
        return Verdict(INCONCLUSIVE, "no finite-value samples of the dual domain")
    for w, _ in finite:
        if not ctx.policy.lt(float(np.dot(x0, w.ustar)), w.alpha):
            return Verdict(VACUOUS, "hypothesis fails: dual domain leaves the required halfspace",
                           witnesses=[w])
    if not cprime_subdiff_member(g, w0, x0, ctx):
        return Verdict(VACUOUS, "x0 is not a dual subgradient at w0")
    slack = ctx.membership_slack(closed_form=ctx.policy.is_exact)
    for w, v in finite:
        bound = gval + float(np.dot(x0, w.xstar - w0.xstar))
        if v < bound - slack:
            return Verdict(FAIL, "classical subgradient inequality violated", [w],
                           {"value": v, "bound": bound})
    return Verdict(PASS, "classical subgradient inequality holds on samples",
                   values={"samples": len(finite)}, label="sampling-based")


def _default_w_samples(g: WFunctionModel, ctx: EvalContext) -> list:
    if isinstance(g, WGridFunction):
        return g.node_triples()
    n = g.dim
    axis = np.linspace(-5.0, 5.0, 9)
    alphas = np.linspace(-5.0, 5.0, 9)
    out = []
    if n == 1:
        for xs in axis:
            for us in axis:
                for a in alphas:
                    out.append(DualTriple([xs], [us], float(a)))
    else:
        pts = np.linspace(-3.0, 3.0, 5)
        for xs1 in pts:
            for xs2 in pts:
                for us1 in pts:
                    for us2 in pts:
                        for a in np.linspace(-3.0, 3.0, 5):
                            out.append(DualTriple([xs1, xs2], [us1, us2], float(a)))
    return out


def envelope_reconstruct(f: FunctionModel, x0, x, ctx: EvalContext = DEFAULT_CTX,
                         rng: np.random.Generator | None = None, k: int = 32) -> Verdict:
    """Rebuild f(x) - f(x0) from coupling differences over sampled
    subgradients; certified only where the subdifferential fills the whole
    conjugate domain (affine models)."""
    if not isinstance(f, Affine):
        return Verdict(INCONCLUSIVE, "hypothesis not certified: subdifferential may be "
                                     "a proper subset of dom of the conjugate")
    rng = rng or np.random.default_rng(0)
    x0 = as_point(x0, f.dim)
    x = as_point(x, f.dim)
    desc = c_subdiff_descriptor(f, x0, 0.0, ctx)
    members = desc.sample_members(rng, k)
    if not members:
        return Verdict(INCONCLUSIVE, "no sampled subgradients")
    best = -INF
    for w in members:
        diff = add_conj(coupling_c(x, w, ctx.policy), -coupling_c(x0, w, ctx.policy))
        best = max(best, diff)
    target = f.evaluate(x, ctx.policy) - f.evaluate(x0, ctx.policy)
    if abs(best - target) <= ctx.membership_slack(closed_form=True):
        return Verdict(PASS, "envelope reconstruction matches",
                       values={"sup": best, "difference": target})
    return Verdict(FAIL, "envelope reconstruction mismatch", [x],
                   {"sup": best, "difference": target})


# ---------------------------------------------------------------------------
# strict separation from a descriptor (even convexity of the subdifferential)
# ---------------------------------------------------------------------------


def descriptor_separator(desc: CSubdiffDescriptor, w: DualTriple):
    """A W-functional (xdir, udir, beta) strictly separating a non-member.

    Returns (functional, certified); member triples y satisfy
    <y - w, functional> < 0.  The x*-factor route is exact in 1-d and
    sample-certified in 2-d.
    """
    x0 = desc.x0
    policy = desc.ctx.policy
    n = desc.f.dim
    if not policy.lt(float(np.dot(x0, w.ustar)), w.alpha):
        # members keep the gate open at x0; w does not
        return (np.zeros(n), np.array(x0), -1.0), True
    if not desc.vcone_member(w.ustar, w.alpha):
        witness = _domain_point_outside(desc.f, w.ustar, w.alpha, policy)
        if witness is None:
            return None, False
        return (np.zeros(n), np.array(witness), -1.0), True
    if desc.f.dim == 1 and not desc.fenchel_member(w.xstar):
        lo, hi = desc.interval()
        sgn = 1.0 if float(w.xstar[0]) > hi else -1.0
        return (np.array([sgn]), np.zeros(1), 0.0), True
    return None, False


def _domain_point_outside(f: FunctionModel, ustar, alpha: float, policy):
    """A domain point breaking <x, u*> < alpha (exists when (u*, a) is off V)."""
    for p in f.dom_extra_points():
        if float(np.dot(p, ustar)) >= alpha:
            return np.asarray(p, dtype=float)
    dom = f.domain()
    grid = np.linspace(-8.0, 8.0, 257)
    if f.dim == 1:
        pts = grid[:, None]
    else:
        pts = np.stack(np.meshgrid(np.linspace(-8, 8, 65), np.linspace(-8, 8, 65), indexing="ij"),
                       axis=-1).reshape(-1, 2)
    inside = dom.member_many(pts, policy)
    vals = pts @ np.asarray(ustar, dtype=float)
    cand = pts[inside & (vals >= alpha)]
    if cand.shape[0]:
        return cand[0]
    return None
