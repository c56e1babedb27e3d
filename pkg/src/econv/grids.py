"""Rectangular sampling grids and the node-budget guard."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = ["GridSpec", "BudgetExceededError", "ensure_budget", "default_budget", "nice_step"]

DEFAULT_BUDGET = 10_000_000

_NICE_STEPS = (
    1.0, 0.5, 0.25, 0.2, 0.1, 0.05, 0.025, 0.02, 0.01,
    0.005, 0.0025, 0.002, 0.001, 0.0005, 0.00025, 0.0002, 0.0001,
)


class BudgetExceededError(ValueError):
    pass


def default_budget() -> int:
    """Node budget for grid suprema; ECONV_BUDGET overrides."""
    raw = os.environ.get("ECONV_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    return int(float(raw))


def ensure_budget(n_nodes: int, max_nodes: int) -> None:
    if n_nodes > max_nodes:
        raise BudgetExceededError(f"grid needs {n_nodes} nodes, budget is {max_nodes}")


def nice_step(halfwidth: float, n_axes: int, max_nodes: int) -> float:
    """Largest step from a round ladder fitting (2h/step + 1)^n_axes in budget."""
    for step in _NICE_STEPS:
        count = int(round(2.0 * halfwidth / step)) + 1
        if count**n_axes <= max_nodes:
            return step
    raise BudgetExceededError(f"no ladder step fits {max_nodes} nodes over {n_axes} axes")


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box sampled with a common step along every axis."""

    box: tuple
    step: float

    def __init__(self, box, step: float):
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        for lo, hi in box:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise ValueError(f"malformed box interval ({lo}, {hi})")
        if step <= 0:
            raise ValueError("step must be positive")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "step", float(step))

    @property
    def ndim(self) -> int:
        return len(self.box)

    def axis_size(self, i: int) -> int:
        lo, hi = self.box[i]
        return int(np.floor((hi - lo) / self.step + 1e-9)) + 1

    def axis(self, i: int) -> np.ndarray:
        lo, _ = self.box[i]
        return lo + self.step * np.arange(self.axis_size(i))

    def axes(self) -> list:
        return [self.axis(i) for i in range(self.ndim)]

    def n_nodes(self) -> int:
        total = 1
        for i in range(self.ndim):
            total *= self.axis_size(i)
        return total

    def points(self) -> np.ndarray:
        """All nodes as a (N, ndim) C-ordered array."""
        axes = self.axes()
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.ascontiguousarray(np.stack([m.ravel() for m in mesh], axis=1))

    def halved(self) -> "GridSpec":
        return GridSpec(self.box, self.step / 2.0)

    def to_json(self) -> dict:
        return {"box": [list(iv) for iv in self.box], "step": self.step}

    @classmethod
    def from_json(cls, data: dict) -> "GridSpec":
        return cls(data["box"], float(data["step"]))
