"""Weyl sums (1/n) sum e(k * k_m * alpha) over characters k = 1..K."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..report import Report
from ..symreal import SymReal, sym, sym_fixed, sym_frac

WORD = 64
MASK = (1 << WORD) - 1
_TWO_PI_OVER_WORD = 2.0 * math.pi / 2.0 ** WORD
_CHUNK = 1 << 16


def _index_values(indices, n: int):
    """Either a named polynomial/exponential family or an explicit int list."""
    if isinstance(indices, str):
        if indices not in ("n", "n^2", "n^3", "2^n"):
            raise ValueError(f"unknown index family {indices!r}")
        return indices
    ks = [int(v) for v in indices]
    if len(ks) < n:
        raise ValueError(f"need {n} indices, got {len(ks)}")
    return ks[:n]


def _phase_sum(phases: np.ndarray) -> complex:
    """Sum of e(phase / 2**64) for uint64 phases."""
    ang = phases.astype(np.float64) * _TWO_PI_OVER_WORD
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def _poly_sum(P: int, power: int, n: int) -> complex:
    total = 0j
    for lo in range(1, n + 1, _CHUNK):
        m = np.arange(lo, min(n, lo + _CHUNK - 1) + 1, dtype=np.uint64)
        km = m ** np.uint64(power)  # wraps mod 2**64, which is harmless for the phase
        total += _phase_sum(km * np.uint64(P))
    return total


def _doubling_sum(x: SymReal, n: int) -> complex:
    """Phases frac(2^m x) for m = 1..n read from one long binary expansion."""
    lo, _ = sym_fixed(sym_frac(x), n + WORD)
    ph = np.empty(n, dtype=np.uint64)
    for m in range(1, n + 1):
        ph[m - 1] = (lo >> (n - m)) & MASK
    return _phase_sum(ph)


def _list_sum(P: int, ks: Sequence[int]) -> complex:
    ph = np.array([(k * P) & MASK for k in ks], dtype=np.uint64)
    return _phase_sum(ph)


def _rational_sum(a: Fraction, family, n: int) -> complex:
    """Exact residues mod the denominator; only the final exponentials are floats."""
    p, q = a.numerator % a.denominator, a.denominator
    if family == "n":
        r = (np.arange(1, n + 1, dtype=object) * p) % q
    elif family in ("n^2", "n^3"):
        e = 2 if family == "n^2" else 3
        r = np.array([(pow(m, e, q) * p) % q for m in range(1, n + 1)], dtype=object)
    elif family == "2^n":
        r = np.array([(pow(2, m, q) * p) % q for m in range(1, n + 1)], dtype=object)
    else:
        r = np.array([(k * p) % q for k in family], dtype=object)
    r = r.astype(np.int64)
    # group equal residues so a constant phase sums to exactly n
    counts = np.bincount(r, minlength=q) if q <= 1 << 22 else None
    if counts is None:
        ang = 2 * np.pi * r / q
        return complex(np.cos(ang).sum(), np.sin(ang).sum())
    nz = np.flatnonzero(counts)
    ang = 2 * np.pi * nz / q
    return complex((counts[nz] * np.cos(ang)).sum(), (counts[nz] * np.sin(ang)).sum())


def geometric_bound(alpha, k: int, n: int) -> float:
    """Oracle 1.1 / (n |sin(pi k alpha)|) for the linear family; inf when k alpha is an integer."""
    s = abs(math.sin(math.pi * (float(sym_frac(sym(alpha) * k)))))
    return math.inf if s == 0 else 1.1 / (n * s)


def weyl_ratio(alpha, k: int, indices="n", n: int = 100_000) -> float:
    """|(1/n) sum_{m=1..n} e(k * k_m * alpha)|."""
    a = alpha if isinstance(alpha, SymReal) else sym(alpha)
    family = _index_values(indices, n)
    ka = a * k
    if ka.is_rational:
        s = _rational_sum(ka.rat, family, n)
    elif family == "2^n":
        s = _doubling_sum(ka, n)
    else:
        P = sym_fixed(sym_frac(ka), WORD)[0] & MASK
        if family == "n":
            s = _poly_sum(P, 1, n)
        elif family == "n^2":
            s = _poly_sum(P, 2, n)
        elif family == "n^3":
            s = _poly_sum(P, 3, n)
        else:
            s = _list_sum(P, family)
    return abs(s) / n


def _phase_error(family, n: int) -> float:
    """Bound on the phase error from truncating frac(k alpha) to 64 bits."""
    if family == "n":
        top = n
    elif family == "n^2":
        top = n ** 2
    elif family == "n^3":
        top = n ** 3
    elif family == "2^n":
        return 2.0 ** -WORD
    else:
        top = max(abs(v) for v in family)
    return float(top) * 2.0 ** -(WORD - 2)


def weyl_test(alpha, indices="n", K: int = 5, n: int = 100_000, tol: float = 1e-2) -> Report:
    """Normalized Weyl sums for k = 1..K; pass iff every ratio is below ``tol``.

    Irrational phases use 64-bit fixed point from an exact enclosure of
    frac(k alpha) (wrapping uint64 products give the phase of k_m k alpha);
    rational alpha goes through exact residues.  The doubling family reads
    frac(2^m k alpha) off one binary expansion of length n + 64.
    """
    if K < 1 or n < 1:
        raise ValueError("K and n must be positive")
    a = alpha if isinstance(alpha, SymReal) else sym(alpha)
    family = _index_values(indices, n)
    ratios, bounds = {}, {}
    for k in range(1, K + 1):
        ratios[k] = weyl_ratio(a, k, family, n)
        if family == "n":
            bounds[k] = geometric_bound(a, k, n)
    worst = max(ratios, key=ratios.get)
    ok = all(r < tol for r in ratios.values())
    ev = {"ratios": ratios, "max_ratio": ratios[worst], "worst_character": worst,
          "exact_route": a.is_rational, "phase_error_bound": 0.0 if a.is_rational else _phase_error(family, n)}
    if bounds:
        ev["geometric_bounds"] = bounds
        ev["within_geometric_bound"] = all(ratios[k] <= bounds[k] for k in ratios)
    label = indices if isinstance(indices, str) else "explicit"
    return Report("weyl_test", "pass" if ok else "fail",
                  {"alpha": a, "indices": label, "K": K, "n": n, "tol": tol}, ev,
                  None if ok else {"character": worst, "ratio": ratios[worst]})
