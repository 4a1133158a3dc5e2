"""Circle-valued coordinates: exact (SymReal, TrigSum) or plain float.

``TrigSum`` represents ``c + sum(a_j * sin(2*pi*x_j))`` with exact ``c`` and
``x_j``.  Arguments are canonicalised into ``[0, 1/4]`` using the symmetries
``sin(2pi(x + 1/2)) = -sin(2pi x)`` and ``sin(2pi(1/2 - x)) = sin(2pi x)``, so
identities such as ``f(g + 1/2) = -f(g)`` for odd sine cocycles are decided by
structural equality.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .symreal import SymReal, sym, sym_frac

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


def _key(x: SymReal):
    return (x.rat, x.coeffs)


class TrigSum:
    __slots__ = ("const", "terms")

    def __init__(self, const=0, terms=()):
        self.const = sym(const) if not isinstance(const, SymReal) else const
        acc: dict[SymReal, Fraction] = {}
        extra = Fraction(0)
        for arg, coeff in terms:
            arg, coeff, shift = _canonical(sym(arg) if not isinstance(arg, SymReal) else arg, Fraction(coeff))
            if shift is not None:
                extra += shift
            elif coeff:
                acc[arg] = acc.get(arg, Fraction(0)) + coeff
        if extra:
            self.const = self.const + extra
        self.terms = tuple(sorted(((a, c) for a, c in acc.items() if c), key=lambda t: _key(t[0])))

    @classmethod
    def sine(cls, arg, coeff=1, const=0) -> TrigSum:
        return cls(const, [(arg, coeff)])

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*sin(2pi*({a}))" for a, c in self.terms)
        return f"TrigSum({self.const}{' + ' + body if body else ''})"

    def __eq__(self, other) -> bool:
        if isinstance(other, TrigSum):
            return self.const == other.const and self.terms == other.terms
        if isinstance(other, (SymReal, int, Fraction)):
            return not self.terms and self.const == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.const, self.terms))

    def __add__(self, other):
        if isinstance(other, TrigSum):
            return TrigSum(self.const + other.const, self.terms + other.terms)
        if isinstance(other, float):
            return float(self) + other
        return TrigSum(self.const + other, self.terms)

    __radd__ = __add__

    def __neg__(self) -> TrigSum:
        return TrigSum(-self.const, [(a, -c) for a, c in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, q):
        if isinstance(q, float):
            return float(self) * q
        q = Fraction(q)
        return TrigSum(self.const * q, [(a, c * q) for a, c in self.terms])

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float(self.const) + sum(float(c) * math.sin(2 * math.pi * float(a)) for a, c in self.terms)

    def mod1(self) -> TrigSum:
        return TrigSum(sym_frac(self.const), self.terms)

    @property
    def is_integer(self) -> bool:
        return not self.terms and self.const.is_rational and self.const.rat.denominator == 1


def _canonical(arg: SymReal, coeff: Fraction):
    """(arg in (0, 1/4), coeff, None) or (None, None, constant) when sin is rational."""
    x = sym_frac(arg)
    if x >= HALF:
        x, coeff = x - HALF, -coeff
    if x > QUARTER:
        x = HALF - x
    if x == 0:
        return None, None, Fraction(0)
    if x == QUARTER:
        return None, None, coeff
    return x, coeff, None


Angle = Union[SymReal, TrigSum, float]


def is_exact(x) -> bool:
    return isinstance(x, (SymReal, TrigSum))


def mod1(x):
    """Reduce a circle coordinate to its canonical representative."""
    if isinstance(x, SymReal):
        return sym_frac(x)
    if isinstance(x, TrigSum):
        return x.mod1()
    if isinstance(x, (int, Fraction)):
        return sym_frac(sym(x))
    v = float(x) % 1.0
    return 0.0 if v >= 1.0 else v


def is_zero_mod1(x, tol: float = 1e-12) -> bool:
    """Exact for symbolic inputs; within ``tol`` of an integer for floats."""
    if isinstance(x, SymReal):
        return x.is_rational and x.rat.denominator == 1
    if isinstance(x, TrigSum):
        return x.is_integer
    return arc(float(x), 0.0) <= tol


def arc_exact(x: SymReal) -> SymReal:
    """Exact distance from x to the nearest integer."""
    u = sym_frac(x)
    v = 1 - u
    return u if u <= v else v


def arc(a: float, b: float) -> float:
    d = (a - b) % 1.0
    return min(d, 1.0 - d)
