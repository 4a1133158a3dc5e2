"""Structured verdicts and JSON conversion shared by every analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .angles import TrigSum
from .symreal import SymReal

VERDICTS = ("pass", "fail", "inconclusive")


def _float(v: float) -> Any:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def jsonable(x) -> Any:
    """Deterministic JSON-ready form of reports, points and exact numbers."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _float(float(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, SymReal):
        return {"exact": str(x), "approx": float(x)}
    if isinstance(x, TrigSum):
        return {"exact": repr(x), "approx": float(x)}
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    if is_dataclass(x):
        out = {"type": type(x).__name__}
        for f in fields(x):
            out[f.name] = jsonable(getattr(x, f.name))
        return out
    return repr(x)


@dataclass
class Report:
    op: str
    verdict: str
    params: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    witness: Any = None

    def __post_init__(self):
        if self.verdict not in VERDICTS and self.verdict not in ("minimal", "nonminimal"):
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        out = {"op": self.op, "params": jsonable(self.params), "verdict": self.verdict,
               "evidence": jsonable(self.evidence)}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        return out
