"""Primal points, dual triples, the coupling function, and halfspaces.

The primal space is R^n with n in {1, 2}; the dual side is
W = R^n x R^n x R, whose elements pair a linear part ``xstar`` with an
open-halfspace gate ``(ustar, alpha)``.  The coupling

    c(x, (x*, u*, alpha)) = <x, x*>   if <x, u*> < alpha,   +inf otherwise

is symmetric in its two readings (primal-on-dual and dual-on-primal), so a
single implementation serves both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extreal import INF, TolerancePolicy, EXACT

__all__ = [
    "as_point",
    "DualTriple",
    "XHalfspace",
    "WHalfspace",
    "coupling_c",
    "coupling_additivity_holds",
    "w_halfspace_member",
]


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-d float vector, optionally checking its length."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise ValueError(f"point must be 1-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.shape[0]}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class DualTriple:
    """A point (x*, u*, alpha) of W = R^n x R^n x R."""

    xstar: np.ndarray
    ustar: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "xstar", as_point(self.xstar))
        object.__setattr__(self, "ustar", as_point(self.ustar, dim=self.xstar.shape[0]))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @property
    def dim(self) -> int:
        return self.xstar.shape[0]

    def __add__(self, other: "DualTriple") -> "DualTriple":
        return DualTriple(self.xstar + other.xstar, self.ustar + other.ustar, self.alpha + other.alpha)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.xstar, self.ustar, [self.alpha]])

    @classmethod
    def from_array(cls, arr, dim: int) -> "DualTriple":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.shape[0] != 2 * dim + 1:
            raise ValueError(f"expected {2 * dim + 1} entries, got {arr.shape[0]}")
        return cls(arr[:dim], arr[dim : 2 * dim], float(arr[-1]))

    def __repr__(self) -> str:
        xs = ",".join(f"{v:g}" for v in self.xstar)
        us = ",".join(f"{v:g}" for v in self.ustar)
        return f"DualTriple(({xs}),({us}),{self.alpha:g})"


@dataclass(frozen=True, eq=False)
class XHalfspace:
    """{x : <x, normal> < level} (strict) or {x : <x, normal> <= level}.

    A zero normal is allowed as a degenerate test object: membership then
    depends only on the sign of ``level``.
    """

    normal: np.ndarray
    level: float
    strict: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "normal", as_point(self.normal))
        object.__setattr__(self, "level", float(self.level))
        if not np.isfinite(self.level):
            raise ValueError("level must be finite")

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def is_degenerate(self) -> bool:
        return not np.any(self.normal)

    def contains(self, x, policy: TolerancePolicy = EXACT) -> bool:
        val = float(np.dot(as_point(x, self.dim), self.normal))
        if self.strict:
            return policy.lt(val, self.level)
        return policy.leq(val, self.level)

    def contains_many(self, pts: np.ndarray, policy: TolerancePolicy = EXACT) -> np.ndarray:
        vals = pts @ self.normal
        if self.strict:
            if policy.is_exact:
                return vals < self.level
            scale = np.maximum(1.0, np.maximum(np.abs(vals), abs(self.level)))
            return vals <= self.level - policy.strict_margin * scale
        return vals <= self.level + policy.eq_tol

    def to_json(self) -> dict:
        return {"normal": list(map(float, self.normal)), "level": self.level, "strict": self.strict}

    @classmethod
    def from_json(cls, data: dict) -> "XHalfspace":
        return cls(np.asarray(data["normal"], dtype=float), float(data["level"]), bool(data.get("strict", False)))


@dataclass(frozen=True, eq=False)
class WHalfspace:
    """Open halfspace in W: {(x*,u*,a) : <x,x*> + <u,u*> + a*beta < level}."""

    x: np.ndarray
    u: np.ndarray
    beta: float
    level: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", as_point(self.x))
        object.__setattr__(self, "u", as_point(self.u, dim=self.x.shape[0]))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "level", float(self.level))


def coupling_c(x, w: DualTriple, policy: TolerancePolicy = EXACT) -> float:
    """c(x, w) = <x, w.xstar> when <x, w.ustar> < w.alpha, else +inf.

    The flipped reading c'(w, x) is the same function of the same arguments.
    """
    pt = as_point(x, w.dim)
    gate = float(np.dot(pt, w.ustar))
    if policy.lt(gate, w.alpha):
        return float(np.dot(pt, w.xstar))
    return INF


def coupling_additivity_holds(x, w1: DualTriple, w2: DualTriple, policy: TolerancePolicy = EXACT) -> bool:
    """True when both coupling gates are open at x.

    Under that guard c(x, w1 + w2) = c(x, w1) + c(x, w2), so callers may sum
    couplings; without it the sum of two +inf gates is not additive.
    """
    pt = as_point(x, w1.dim)
    return policy.lt(float(np.dot(pt, w1.ustar)), w1.alpha) and policy.lt(
        float(np.dot(pt, w2.ustar)), w2.alpha
    )


def w_halfspace_member(h: WHalfspace, w: DualTriple, policy: TolerancePolicy = EXACT) -> bool:
    """Strict membership of a dual triple in an open W-halfspace."""
    val = float(np.dot(h.x, w.xstar) + np.dot(h.u, w.ustar) + w.alpha * h.beta)
    return policy.lt(val, h.level)
