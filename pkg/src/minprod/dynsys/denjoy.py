"""Denjoy blow-up of an irrational rotation on a finite window of the marked orbit.

The marked points ``x_n = n * alpha mod 1`` with ``|n| <= W`` are doubled into
a left (``minus``) and right (``plus``) copy.  The order embedding
``e(pos, side) = pos * (1 - L) + sum(l_m : x_m < pos) + [side = plus] * l_n``
with gap lengths ``l_n = c * 2**-|n| / 3`` (total ``L <= c``) places the
resulting Cantor set on the circle; the metric is circular distance in ``e``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from ..symreal import SymReal, sym, sym_frac
from .constructors import circle_rotation
from .points import Circle, Denjoy
from .spaces import Net, Space, _circ, _rng_fraction, dyadic_cells
from .system import System

SIDE_CODE = {None: 0.0, "minus": -1.0, "plus": 1.0}


class WindowOverflow(ArithmeticError):
    """An orbit computation needed a marked index outside the tracked window."""


@dataclass(eq=False)
class FactorMap:
    """Semiconjugacy ``project``: source -> target with a fiber enumerator."""

    source: System
    target: System
    project: Callable
    fiber_probe: Callable
    singular_targets: tuple = ()
    name: str = "factor"


class DenjoySpace(Space):
    kind = "denjoy"
    dim = 3

    def __init__(self, alpha: SymReal, c: Fraction = Fraction(1, 2), window: int = 200):
        alpha = alpha if isinstance(alpha, SymReal) else sym(alpha)
        if alpha.is_rational:
            raise ValueError("blow-up needs an irrational rotation")
        c = Fraction(c)
        if not 0 < c < 1:
            raise ValueError("gap ratio must lie in (0, 1)")
        self.alpha = alpha
        self.c = c
        self.window = window
        ns = np.arange(-window, window + 1)
        self.marks = [sym_frac(alpha * int(n)) for n in ns]
        self._mark_index = {x: int(n) for x, n in zip(self.marks, ns)}
        self.xs = np.array([float(x) for x in self.marks])
        ell = [c / 3 / 2 ** abs(int(n)) for n in ns]
        self.ell_exact = ell
        self.ell = np.array([float(v) for v in ell])
        self.L = float(sum(ell))
        self.order = np.argsort(self.xs)
        self.sorted_x = self.xs[self.order]
        self.cum = np.concatenate([[0.0], np.cumsum(self.ell[self.order])])
        before = np.empty_like(self.ell)
        before[self.order] = self.cum[:-1]
        self.e_minus = self.xs * (1.0 - self.L) + before
        self.e_plus = self.e_minus + self.ell
        self._alpha_lead = next(i for i, q in enumerate(alpha.coefficient_vector()[1:]) if q)

    def __eq__(self, other) -> bool:
        return (isinstance(other, DenjoySpace) and other.alpha == self.alpha and other.c == self.c
                and other.window == self.window)

    __hash__ = Space.__hash__

    def orbit_index(self, pos) -> int | None:
        """n with pos = n * alpha mod 1 exactly, or None (floats are never marked)."""
        if not isinstance(pos, SymReal):
            return None
        coeffs = pos.coefficient_vector()[1:]
        lead = self.alpha.coefficient_vector()[1 + self._alpha_lead]
        n = coeffs[self._alpha_lead] / lead if self._alpha_lead < len(coeffs) else Fraction(0)
        if n.denominator != 1:
            return None
        d = pos - self.alpha * int(n)
        if d.is_rational and d.rat.denominator == 1:
            return int(n)
        return None

    def marked_index(self, pos) -> int | None:
        """Window index of a reduced coordinate, or None."""
        if not isinstance(pos, SymReal):
            return None
        return self._mark_index.get(pos)

    def point(self, pos, side: str | None = None) -> Denjoy:
        pos = sym_frac(pos if isinstance(pos, SymReal) else sym(pos))
        n = self.marked_index(pos)
        if n is None:
            if side is not None:
                raise ValueError("only marked points carry a side")
            return Denjoy(pos)
        if side not in ("minus", "plus"):
            raise ValueError(f"marked point x_{n} needs side minus or plus")
        return Denjoy(pos, side, n)

    def encode(self, p: Denjoy) -> np.ndarray:
        return np.array([float(p.pos) % 1.0, SIDE_CODE[p.side], float(p.index or 0)])

    def decode(self, v) -> Denjoy:
        side = {-1: "minus", 1: "plus"}.get(int(v[1]))
        if side is None:
            return Denjoy(sym(Fraction(float(v[0]))))
        return Denjoy(self.marks[int(v[2]) + self.window], side, int(v[2]))

    def embed(self, enc: np.ndarray) -> np.ndarray:
        """Order-embedding coordinate e for encoded points."""
        enc = np.asarray(enc, dtype=float)
        pos, side, idx = enc[..., 0], enc[..., 1], enc[..., 2]
        cnt = np.searchsorted(self.sorted_x, pos, side="left")
        e_free = pos * (1.0 - self.L) + self.cum[cnt]
        row = np.clip(idx.astype(np.int64) + self.window, 0, 2 * self.window)
        e_mark = np.where(side > 0, self.e_plus[row], self.e_minus[row])
        return np.where(side != 0, e_mark, e_free)

    def dist(self, a, b):
        return _circ(self.embed(a) - self.embed(b))

    def contains(self, p) -> bool:
        if not isinstance(p, Denjoy):
            return False
        if isinstance(p.pos, SymReal):
            if sym_frac(p.pos) != p.pos:
                return False
            n = self.marked_index(p.pos)
            if n is None:
                return p.side is None and p.index is None
            return p.side in ("minus", "plus") and p.index == n
        return p.side is None and 0.0 <= float(p.pos) < 1.0

    def base_point(self) -> Denjoy:
        return Denjoy(self.marks[self.window], "minus", 0)

    def _random(self, rng) -> Denjoy:
        return Denjoy(sym(_rng_fraction(rng)))

    def net(self, eps: float) -> Net:
        """Dyadic cells of the embedding coordinate that meet the embedded Cantor set."""
        m = dyadic_cells(eps)
        order_minus = np.argsort(self.e_minus)
        em_sorted = self.e_minus[order_minus]
        ep_sorted = np.sort(self.e_plus)
        reps: list[Denjoy] = []
        lookup = np.full(m, -1, dtype=np.int64)
        merge: list[int] = []
        for j in range(m):
            a, b = j / m, (j + 1) / m
            g = int(np.searchsorted(em_sorted, a, side="right")) - 1
            rep = None
            if g >= 0:
                row = int(order_minus[g])
                lo, hi = self.e_minus[row], self.e_plus[row]
                n = row - self.window
                if a == lo and hi >= b:
                    # only the left end point of a gap: it is a limit of the previous cell
                    merge.append(j)
                    continue
                if a == lo:
                    rep = Denjoy(self.marks[row], "minus", n)
                elif a < hi:
                    if hi < b:
                        rep = Denjoy(self.marks[row], "plus", n)
                    else:
                        continue
            if rep is None:
                k = int(np.searchsorted(ep_sorted, a, side="right"))
                rep = Denjoy(sym(Fraction((a - self.cum[k]) / (1.0 - self.L))))
            lookup[j] = len(reps)
            reps.append(rep)
        for j in merge:
            lookup[j] = lookup[(j - 1) % m]
        enc = np.stack([self.encode(p) for p in reps])

        def locate(x):
            cell = np.minimum(np.floor(self.embed(x) * m).astype(np.int64), m - 1)
            return lookup[cell]

        # a cell (or a merged end point) is within 1/m of its representative
        return Net(len(reps), lambda i: reps[i], lambda: enc, locate, eps, 1.0 / m)


def denjoy_system(alpha, c=Fraction(1, 2), window: int = 200) -> tuple[System, FactorMap]:
    space = DenjoySpace(alpha, c, window)
    alpha = space.alpha
    af = float(sym_frac(alpha))
    W = window

    def moved(p: Denjoy, shift: int) -> Denjoy:
        pos = sym_frac(p.pos + (alpha if shift == 1 else alpha * shift))
        if p.side is not None:
            n = p.index + shift
            return Denjoy(pos, p.side, n) if abs(n) <= W else Denjoy(pos)
        if space.marked_index(pos) is not None:
            raise WindowOverflow(f"orbit enters the marked window at {pos}")
        return Denjoy(pos)

    def orbit_at(enc0, ns):
        ns = np.asarray(ns)
        if ns.ndim == 1:
            ns = np.broadcast_to(ns, (enc0.shape[0], ns.shape[0]))
        pos = (enc0[:, None, 0] + ns * af) % 1.0
        marked = enc0[:, None, 1] != 0
        idx = enc0[:, None, 2] + ns
        keep = marked & (np.abs(idx) <= W)
        side = np.where(keep, enc0[:, None, 1], 0.0)
        return np.stack([pos, side, np.where(keep, idx, 0.0)], axis=-1)

    def fstep(e):
        flat = np.asarray(e, dtype=float).reshape(-1, 3)
        return orbit_at(flat, np.array([1]))[:, 0].reshape(np.shape(e))

    system = System(
        space=space,
        step=lambda p: moved(p, 1),
        inverse=lambda p: moved(p, -1),
        power=moved,
        name=f"denjoy({alpha}, c={c}, W={window})",
        params={"alpha": alpha, "c": Fraction(c), "window": window},
        fstep=fstep,
        orbit_at=orbit_at,
        period=lambda p: math.inf,
    )
    target = circle_rotation(alpha)

    def project(p: Denjoy) -> Circle:
        return Circle(p.pos)

    def fiber_probe(t: Circle, resolution: float = 1e-3) -> list:
        if isinstance(t.s, SymReal):
            n = space.marked_index(t.s)
            if n is None:
                return [Denjoy(t.s)]
            return [Denjoy(t.s, "minus", n), Denjoy(t.s, "plus", n)]
        d = _circ(space.xs - float(t.s))
        hits = np.flatnonzero(d <= resolution)
        if len(hits) == 0:
            return [Denjoy(float(t.s))]
        out = []
        for row in hits:
            n = int(row) - W
            out += [Denjoy(space.marks[row], "minus", n), Denjoy(space.marks[row], "plus", n)]
        return out

    fm = FactorMap(system, target, project, fiber_probe,
                   singular_targets=tuple(Circle(x) for x in space.marks), name="denjoy->rotation")
    return system, fm
