"""Verdicts, check records, and the deterministic report format.

Reports serialize to UTF-8 JSON with numbers rendered at 17 significant
digits and infinities encoded as the strings "inf" / "-inf", so every
extended real round-trips losslessly.  The byte stream is deterministic
for fixed inputs and seed: wall-clock runtimes are kept on the in-memory
records (and printed to the console) but written as null.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
VACUOUS = "VACUOUS"
INCONCLUSIVE = "INCONCLUSIVE"

_STATUSES = (PASS, FAIL, VACUOUS, INCONCLUSIVE)

__all__ = [
    "PASS",
    "FAIL",
    "VACUOUS",
    "INCONCLUSIVE",
    "Verdict",
    "CheckRecord",
    "Report",
    "encode_value",
    "decode_value",
    "exit_code",
    "input_hash_of",
]


def encode_value(v):
    """JSON-encode floats (17 significant digits, inf as strings) and arrays."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if f == int(f) and abs(f) < 1e15:
            return f
        return float(format(f, ".17g"))
    if isinstance(v, np.ndarray):
        return [encode_value(x) for x in v.tolist()]
    if hasattr(v, "as_array"):  # dual triples serialize as flat arrays
        return encode_value(v.as_array())
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if v is None or isinstance(v, str):
        return v
    return str(v)


def decode_value(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    if isinstance(v, list):
        return [decode_value(x) for x in v]
    if isinstance(v, dict):
        return {k: decode_value(x) for k, x in v.items()}
    return v


@dataclass
class Verdict:
    """Outcome of a single mathematical check.

    A FAIL always carries a concrete witness (a point or dual triple along
    with the values of both sides).  PASS verdicts for sampled inclusions
    are labeled as sampling-based; they are honest positives, while a FAIL
    is a certified counterexample.
    """

    status: str
    reason: str = ""
    witnesses: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self) -> None:
        if self.status not in _STATUSES:
            raise ValueError(f"unknown verdict status {self.status!r}")
        if self.status == FAIL and not self.witnesses:
            raise ValueError("a FAIL verdict must carry a witness")

    @property
    def ok(self) -> bool:
        return self.status in (PASS, VACUOUS)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "witnesses": encode_value(self.witnesses),
            "values": encode_value(self.values),
            "label": self.label,
        }


@dataclass
class CheckRecord:
    check_id: str
    statement: str
    verdict: Verdict
    mode: str = "EXACT"
    runtime: float | None = None

    def to_json(self, stable: bool = True) -> dict:
        return {
            "check_id": self.check_id,
            "statement": self.statement,
            "verdict": self.verdict.to_json(),
            "mode": self.mode,
            "runtime": None if stable else self.runtime,
        }


@dataclass
class Report:
    records: list = field(default_factory=list)
    toolkit_version: str = "0.1.0"
    input_hash: str = ""

    def add(self, record: CheckRecord) -> None:
        self.records.append(record)

    def summary(self) -> dict:
        counts = {s: 0 for s in _STATUSES}
        for r in self.records:
            counts[r.verdict.status] += 1
        return counts

    def to_json(self, stable: bool = True) -> dict:
        return {
            "toolkit_version": self.toolkit_version,
            "input_hash": self.input_hash,
            "summary": self.summary(),
            "checks": [r.to_json(stable=stable) for r in self.records],
        }

    def to_bytes(self) -> bytes:
        return json.dumps(self.to_json(stable=True), sort_keys=True, indent=2).encode("utf-8") + b"\n"

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    def console_lines(self) -> list:
        lines = []
        for r in self.records:
            rt = f" [{r.runtime:.3f}s]" if r.runtime is not None else ""
            reason = f" -- {r.verdict.reason}" if r.verdict.reason else ""
            lines.append(f"{r.verdict.status:<12} {r.check_id:<32} {r.mode:<5}{rt}{reason}")
        counts = self.summary()
        lines.append(
            "summary: "
            + ", ".join(f"{k}={v}" for k, v in counts.items() if v)
        )
        return lines


def input_hash_of(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def exit_code(report: Report) -> int:
    """0 all PASS/VACUOUS; 1 any FAIL; 2 any INCONCLUSIVE without FAIL."""
    counts = report.summary()
    if counts[FAIL]:
        return 1
    if counts[INCONCLUSIVE]:
        return 2
    return 0
