"""Problem-file ingestion: JSON descriptions of spaces, functions, DC pairs,
tolerances, budgets, and the checks to run.

Validation errors carry the JSON path of the offending entry.  Numbers may
use the strings "inf" / "-inf"; seeds are mandatory wherever sampling is
involved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .conjugate import EvalContext
from .dc import DCProblem
from .extreal import TolerancePolicy
from .functions import (
    Affine,
    FunctionModel,
    GridFunction,
    Indicator,
    QuadraticRestricted,
    SumFunction,
    XLogXOverY,
)
from .grids import GridSpec, default_budget
from .report import decode_value, input_hash_of
from .sets import FlaggedConvexSet

__all__ = ["ProblemFileError", "Problem", "load_problem", "parse_problem"]


class ProblemFileError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Problem:
    space_dim: int
    functions: dict
    policy: TolerancePolicy
    max_nodes: int
    dc: DCProblem | None = None
    checks: list = field(default_factory=list)
    grids: dict = field(default_factory=dict)
    input_hash: str = ""

    def function(self, name: str) -> FunctionModel:
        if name not in self.functions:
            raise ProblemFileError(f"functions.{name}", "unknown function name")
        return self.functions[name]

    def context(self, **overrides) -> EvalContext:
        kw = {"policy": self.policy, "max_nodes": self.max_nodes}
        kw.update(overrides)
        return EvalContext(**kw)

    def xgrid_for(self, name: str) -> GridSpec | None:
        return self.grids.get(name)


def _need(data: dict, key: str, path: str):
    if key not in data:
        raise ProblemFileError(path, f"missing required key {key!r}")
    return data[key]


def _parse_set(data: dict, dim: int, path: str) -> FlaggedConvexSet:
    try:
        halfspaces = data.get("halfspaces", [])
        payload = {"dim": data.get("dim", dim), "halfspaces": halfspaces}
        return FlaggedConvexSet.from_json(payload)
    except (KeyError, ValueError, TypeError) as exc:
        raise ProblemFileError(path, f"malformed set: {exc}") from None


def _parse_function(name: str, spec: dict, dim: int, functions: dict, path: str) -> FunctionModel:
    kind = _need(spec, "kind", path)
    try:
        if kind == "affine":
            return Affine(np.asarray(_need(spec, "a", path), dtype=float), float(_need(spec, "b", path)))
        if kind == "quadratic":
            dom = _parse_set(spec["dom"], dim, f"{path}.dom") if "dom" in spec else FlaggedConvexSet([], dim=dim)
            return QuadraticRestricted(
                np.asarray(_need(spec, "Q", path), dtype=float),
                np.asarray(_need(spec, "b", path), dtype=float),
                float(spec.get("cst", 0.0)),
                dom,
                econvex=spec.get("econvex"),
            )
        if kind == "indicator":
            return Indicator(_parse_set(_need(spec, "dom", path), dim, f"{path}.dom"))
        if kind == "xlogxy":
            dom = _parse_set(spec["dom"], dim, f"{path}.dom") if "dom" in spec else None
            return XLogXOverY(dom=dom, include_origin=bool(spec.get("include_origin", True)))
        if kind == "grid":
            gspec = GridSpec(_need(spec, "box", path), float(_need(spec, "step", path)))
            values = np.asarray([decode_value(v) for v in _need(spec, "values", path)], dtype=float)
            return GridFunction(gspec, values)
        if kind == "sum":
            terms = []
            for tname in _need(spec, "terms", path):
                if tname not in functions:
                    raise ProblemFileError(path, f"sum term {tname!r} must be declared earlier")
                terms.append(functions[tname])
            return SumFunction(terms)
    except ProblemFileError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ProblemFileError(path, f"malformed {kind!r} spec: {exc}") from None
    raise ProblemFileError(path, f"unknown function kind {kind!r}")


def parse_problem(data: dict, raw: bytes = b"") -> Problem:
    dim = int(_need(data, "space_dim", "space_dim"))
    if dim not in (1, 2):
        raise ProblemFileError("space_dim", "space_dim must be 1 or 2")
    policy = TolerancePolicy.from_json(data.get("tolerance", {"mode": "EXACT"}))
    budgets = data.get("budgets", {})
    max_nodes = int(budgets.get("max_nodes", default_budget()))

    functions: dict = {}
    grids: dict = {}
    for name, spec in data.get("functions", {}).items():
        path = f"functions.{name}"
        if not isinstance(spec, dict):
            raise ProblemFileError(path, "function spec must be an object")
        functions[name] = _parse_function(name, spec, dim, functions, path)
        if functions[name].dim != dim:
            raise ProblemFileError(path, "function dimension disagrees with space_dim")
        if "grid" in spec:
            grids[name] = GridSpec(spec["grid"]["box"], float(spec["grid"]["step"]))

    dc = None
    if "dc" in data:
        d = data["dc"]
        fname, gname = _need(d, "f", "dc"), _need(d, "g", "dc")
        for nm in (fname, gname):
            if nm not in functions:
                raise ProblemFileError("dc", f"unknown function {nm!r}")
        try:
            dc = DCProblem(
                functions[fname],
                functions[gname],
                [tuple(iv) for iv in _need(d, "search_box", "dc.search_box")],
                float(_need(d, "search_step", "dc.search_step")),
            )
        except ValueError as exc:
            raise ProblemFileError("dc", str(exc)) from None

    checks = []
    for i, c in enumerate(data.get("checks", [])):
        path = f"checks[{i}]"
        if not isinstance(c, dict) or "check_id" not in c:
            raise ProblemFileError(path, "each check needs a check_id")
        if _check_uses_sampling(c) and "seed" not in c:
            raise ProblemFileError(path, "a seed is mandatory when sampling is used")
        checks.append(dict(c))

    return Problem(
        space_dim=dim,
        functions=functions,
        policy=policy,
        max_nodes=max_nodes,
        dc=dc,
        checks=checks,
        grids=grids,
        input_hash=input_hash_of(raw) if raw else "",
    )


def _check_uses_sampling(check: dict) -> bool:
    return any(k in check for k in ("samples", "n_samples")) or check.get("check_id", "").startswith(
        ("cor-", "dc-", "thm-")
    )


def load_problem(path) -> Problem:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        data = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ProblemFileError("<file>", f"invalid JSON: {exc}") from None
    return parse_problem(data, raw)
