"""Periodic recurrence: for each radius, a period p with S^(kp) x staying close to x."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..angles import arc_exact
from ..dynsys import CantorSpace, CircleSpace, FiniteSpace, ProductSpace, System, TorusSpace, is_symbolic_point
from ..report import Report
from ..symreal import SymReal, rational_independence, sym_compare


def exact_distance(space, p, q):
    """Exact metric value for symbolic points, or None when the space has no exact route."""
    if isinstance(space, CantorSpace):
        return space.exact_distance(p, q)
    if isinstance(space, CircleSpace):
        return arc_exact(p.s - q.s)
    if isinstance(space, TorusSpace):
        return max((arc_exact(a - b) for a, b in zip(p.coords, q.coords)), key=float)
    if isinstance(space, FiniteSpace):
        return Fraction(int(p.index != q.index))
    if isinstance(space, ProductSpace):
        a = exact_distance(space.left, p.left, q.left)
        b = exact_distance(space.right, p.right, q.right)
        if a is None or b is None:
            return None
        return a if sym_compare(a, b) >= 0 else b
    return None


def _within(d, r) -> bool:
    return sym_compare(d, Fraction(r)) <= 0


def _verify(S: System, x, p: int, r: float, count: int) -> bool:
    for k in range(1, count + 1):
        d = exact_distance(S.space, S.iterate(x, k * p), x)
        if d is None or not _within(d, r):
            return False
    return True


def _irrational_rotation(S: System) -> bool:
    """True when every nonzero multiple of the rotation is again totally irrational on some axis."""
    if S.rotation is None:
        return False
    return any(not a.is_rational for a in S.rotation) and all(
        rational_independence([a]).independent for a in S.rotation if not a.is_rational)


def periodic_recurrence_check(S: System, x=None, depth: int = 10, radii=None, max_period: int = 1 << 16,
                              verify: int = 16) -> Report:
    """Smallest p <= max_period with d(S^(kp) x, x) <= r for k = 1..verify, for r = 2^-m, m = 0..depth.

    Candidates come from one numeric orbit of length verify * max_period;
    the chosen period is then checked exactly on symbolic points.  For an
    irrational rotation no period is exact (p alpha is irrational, so the
    multiples k p alpha are dense); the near-periods found are reported with
    their drift ||p alpha||.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    x = S.space.base_point() if x is None else x
    radii = [2.0 ** -m for m in range(depth + 1)] if radii is None else list(radii)
    T = verify * max_period
    enc = S.space.encode(x)[None]
    d = np.concatenate([blk[0] for _, blk in S.chunks(enc, 0, T + 1)], axis=0)
    d = S.space.dist(d, enc)
    ks = np.arange(1, verify + 1)
    worst = np.array([d[ks * p].max() for p in range(1, max_period + 1)])  # worst return per candidate period
    symbolic = is_symbolic_point(x)
    irrational = _irrational_rotation(S)
    entries = []
    for r in radii:
        ok = np.flatnonzero(worst <= r + 1e-12) + 1
        entry = {"radius": r, "period": None, "verified_returns": 0, "exact": False}
        for p in ok[:8]:
            p = int(p)
            if symbolic and not irrational and _verify(S, x, p, r, verify):
                entry.update(period=p, verified_returns=verify, exact=True)
                break
            if entry["period"] is None:
                entry.update(period=p, verified_returns=verify)
        if irrational and entry["period"] is not None:
            drift = [arc_exact(a * entry["period"]) for a in S.rotation]
            entry["drift"] = max(float(v) for v in drift)
        entries.append(entry)
    params = {"depth": depth, "max_period": max_period, "verify": verify, "point": x}
    if irrational:
        return Report("periodic_recurrence_check", "fail", params,
                      {"entries": entries, "reason": "p*alpha is irrational for every p >= 1, so k*p*alpha is dense "
                                                     "and no neighborhood is returned to for all k"},
                      {"rotation": list(S.rotation)})
    all_exact = all(e["exact"] for e in entries)
    return Report("periodic_recurrence_check", "pass" if all_exact else "inconclusive", params,
                  {"entries": entries})
