"""Extended-real arithmetic and the global tolerance policy.

Extended reals are plain IEEE floats restricted to R u {-inf, +inf}; NaN is
rejected at every entry point, so the three-variant invariant (finite /
+inf / -inf) holds for any value produced here.

Two subtraction conventions coexist and every call site must pick one:

* ``add_conj``/``sub_conj`` -- conjugation arithmetic, where any mixture of
  +inf and -inf collapses to -inf (suprema of differences stay well defined).
* ``sub_dc`` -- difference-of-convex objective arithmetic, where
  (+inf) - (+inf) = +inf (an objective is +inf wherever the first term is).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

INF = math.inf
NEG_INF = -math.inf

__all__ = [
    "INF",
    "NEG_INF",
    "as_extreal",
    "is_finite",
    "add_conj",
    "sub_conj",
    "sub_dc",
    "TolerancePolicy",
    "EXACT",
]


def as_extreal(value: float) -> float:
    """Validate a float as an extended real (NaN is not representable)."""
    v = float(value)
    if math.isnan(v):
        raise ValueError("NaN is not a valid extended real")
    return v


def is_finite(value: float) -> bool:
    return math.isfinite(value)


def add_conj(a: float, b: float) -> float:
    """Addition under the conjugation conventions.

    Mixed infinities collapse: (+inf) + (-inf) = (-inf) + (+inf) = -inf.
    Total on extended reals; never returns NaN.
    """
    if math.isinf(a) and math.isinf(b):
        return a if a == b else NEG_INF
    if math.isinf(a):
        return a
    if math.isinf(b):
        return b
    return a + b


def sub_conj(a: float, b: float) -> float:
    """a - b under the conjugation conventions: add_conj(a, -b)."""
    return add_conj(a, -b)


def sub_dc(a: float, b: float) -> float:
    """a - b under the DC-objective convention (+inf) - (+inf) = +inf.

    (-inf) - (-inf) falls outside the proper-function setting; it returns
    +inf and emits a diagnostic warning.
    """
    if a == INF:
        return INF
    if a == NEG_INF:
        if b == NEG_INF:
            warnings.warn(
                "sub_dc(-inf, -inf) is outside the proper-function setting; "
                "returning +inf",
                RuntimeWarning,
                stacklevel=2,
            )
            return INF
        return NEG_INF
    # a finite
    if b == INF:
        return NEG_INF
    if b == NEG_INF:
        return INF
    return a - b


@dataclass(frozen=True)
class TolerancePolicy:
    """Comparison policy shared by every module.

    EXACT mode performs plain float comparisons (eq_tol = strict_margin = 0).
    GRID mode accepts ``a < b`` only with a declared relative margin and
    treats values within ``eq_tol`` as equal.
    """

    mode: str = "EXACT"
    eq_tol: float = 0.0
    strict_margin: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in ("EXACT", "GRID"):
            raise ValueError(f"unknown tolerance mode {self.mode!r}")
        if self.eq_tol < 0 or self.strict_margin < 0:
            raise ValueError("tolerances must be non-negative")
        if self.mode == "EXACT" and (self.eq_tol != 0.0 or self.strict_margin != 0.0):
            raise ValueError("EXACT mode requires eq_tol = strict_margin = 0")

    @classmethod
    def exact(cls) -> "TolerancePolicy":
        return cls("EXACT", 0.0, 0.0)

    @classmethod
    def grid(cls, eq_tol: float = 1e-6, strict_margin: float = 1e-9) -> "TolerancePolicy":
        return cls("GRID", eq_tol, strict_margin)

    @property
    def is_exact(self) -> bool:
        return self.mode == "EXACT"

    def margin_at(self, a: float, b: float) -> float:
        """Effective strict-inequality margin, relative to magnitude."""
        if self.mode == "EXACT":
            return 0.0
        scale = max(1.0, abs(a) if math.isfinite(a) else 1.0, abs(b) if math.isfinite(b) else 1.0)
        return self.strict_margin * scale

    def lt(self, a: float, b: float) -> bool:
        """Strict a < b; in GRID mode the inequality must hold by a margin."""
        if math.isinf(a) or math.isinf(b):
            return a < b
        if self.mode == "EXACT":
            return a < b
        return a <= b - self.margin_at(a, b)

    def leq(self, a: float, b: float) -> bool:
        """a <= b up to eq_tol (GRID mode)."""
        if math.isinf(a) or math.isinf(b):
            return a <= b
        return a <= b + self.eq_tol

    def eq(self, a: float, b: float) -> bool:
        if math.isinf(a) or math.isinf(b):
            return a == b
        return abs(a - b) <= self.eq_tol

    def to_json(self) -> dict:
        return {"mode": self.mode, "eq_tol": self.eq_tol, "strict_margin": self.strict_margin}

    @classmethod
    def from_json(cls, data: dict) -> "TolerancePolicy":
        mode = data.get("mode", "EXACT")
        if mode == "EXACT":
            return cls.exact()
        return cls.grid(
            eq_tol=float(data.get("eq_tol", 1e-6)),
            strict_margin=float(data.get("strict_margin", 1e-9)),
        )


EXACT = TolerancePolicy.exact()
