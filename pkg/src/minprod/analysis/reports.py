"""Result records for density scans and hitting sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..dynsys import Ball, Obstruction
from ..report import Report, jsonable


@dataclass
class DensityReport:
    """Outcome of an orbit-density scan.

    ``worst_cover_fraction`` is the minimum over sampled starting points of
    the fraction of net cells the orbit visits.  ``fail`` always comes with
    an exact ``obstruction``; an incomplete cover without one is
    ``inconclusive``.
    """

    epsilon: float
    horizon: int
    samples: int
    worst_cover_fraction: float
    witness: Any
    verdict: str
    obstruction: Obstruction | None = None
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.verdict == "pass") != (self.worst_cover_fraction == 1.0):
            raise ValueError("pass exactly when every sampled orbit covers the net")
        if self.verdict == "fail" and self.obstruction is None:
            raise ValueError("fail needs an exact obstruction")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def report(self, op: str = "minimality_scan", params: dict | None = None) -> Report:
        ev = dict(self.evidence)
        ev["worst_cover_fraction"] = self.worst_cover_fraction
        if self.obstruction is not None:
            ev["obstruction"] = self.obstruction
        base = {"epsilon": self.epsilon, "horizon": self.horizon, "samples": self.samples}
        return Report(op, self.verdict, {**base, **(params or {})}, jsonable(ev), self.witness)

    def to_json(self) -> dict:
        return self.report().to_json()


@dataclass
class HittingSet:
    """Sampled hitting times ``n`` in [1, horizon] with ``T^n(U)`` meeting ``V``.

    ``times`` holds at most ``cap`` smallest times; ``count`` is the total.
    Gaps are measured over ``{0} + times``; ``tail_gap`` is horizon minus the
    last time and is not part of ``max_gap``.
    """

    pair: tuple[Ball, Ball]
    times: list[int]
    count: int
    max_gap: int | None
    tail_gap: int
    horizon: int
    truncated: bool = False

    @property
    def hit(self) -> bool:
        return self.count > 0

    def to_json(self) -> dict:
        return jsonable({"pair": [{"center": b.center, "radius": b.radius} for b in self.pair],
                         "times": self.times, "count": self.count, "max_gap": self.max_gap,
                         "tail_gap": self.tail_gap, "horizon": self.horizon, "truncated": self.truncated})
