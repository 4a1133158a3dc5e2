"""Exact reals in the span of 1 and a registry of irrational generators.

A :class:`SymReal` is ``r + sum(q_i * g_i)`` with rational ``r`` and ``q_i``,
where the ``g_i`` are generators declared in a :class:`BasisRegistry`.  The
generators together with 1 are assumed rationally independent; every exact
decision in this module is conditional on that axiom.

Order questions (floor, comparison) are settled by dyadic enclosures: each
generator provides ``floor(g * 2**k)`` exactly, so enclosures are nested
under refinement and never involve floating point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterable, Sequence

__all__ = [
    "BasisRegistry",
    "SymReal",
    "PrecisionExhausted",
    "RefinementBudgetExceeded",
    "IndependenceVerdict",
    "DEFAULT_REGISTRY",
    "CATALOG",
    "const",
    "sym",
    "sym_eval",
    "sym_fixed",
    "sym_floor",
    "sym_frac",
    "sym_compare",
    "rational_independence",
]

DEFAULT_MIN_WIDTH = Fraction(1, 10**30)


class PrecisionExhausted(ArithmeticError):
    """Floor could not be decided before the enclosure budget ran out."""


class RefinementBudgetExceeded(ArithmeticError):
    """Comparison did not separate from zero; suspect an undeclared relation."""


# -- enclosure oracles -------------------------------------------------------
#
# Each oracle maps k >= 0 to floor(value * 2**k).  Cells [m, m+1] / 2**k are
# nested in k, which is what makes sym_eval intervals nested.


def _sqrt_oracle(n: int) -> Callable[[int], int]:
    def floor_scaled(k: int) -> int:
        return math.isqrt(n << (2 * k))

    return floor_scaled


def _atan_inv(x: int, prec: int) -> tuple[int, int]:
    """Fixed-point atan(1/x) * 2**prec with an absolute error bound in units."""
    one = 1 << prec
    x2 = x * x
    power = one // x
    total = power
    k = 1
    terms = 1
    while power:
        power //= x2
        term = power // (2 * k + 1)
        total = total - term if k % 2 else total + term
        k += 1
        terms += 1
    return total, 4 * (terms + 2)


def _pi_floor_scaled(k: int) -> int:
    guard = 32
    while True:
        prec = k + guard
        a, ea = _atan_inv(5, prec)
        b, eb = _atan_inv(239, prec)
        approx = 16 * a - 4 * b
        err = 16 * ea + 4 * eb
        lo = (approx - err) >> guard
        hi = (approx + err) >> guard
        if lo == hi:
            return lo
        guard += 32


@dataclass(frozen=True)
class _Generator:
    name: str
    floor_scaled: Callable[[int], int]


# Primitive generators.  "golden" is not primitive: it is 1/2 + sqrt5/2, so
# declaring it alongside sqrt5 cannot break the independence axiom.
_PRIMITIVES: dict[str, Callable[[int], int]] = {
    "sqrt2": _sqrt_oracle(2),
    "sqrt3": _sqrt_oracle(3),
    "sqrt5": _sqrt_oracle(5),
    "pi": _pi_floor_scaled,
}
_DERIVED: dict[str, tuple[Fraction, dict[str, Fraction]]] = {
    "golden": (Fraction(1, 2), {"sqrt5": Fraction(1, 2)}),
}
CATALOG = ("sqrt2", "sqrt3", "sqrt5", "golden", "pi")


class BasisRegistry:
    """Append-only list of named irrational generators.

    ``min_width`` is the refinement budget shared by floor and comparison.
    """

    def __init__(self, names: Iterable[str] = (), min_width: Fraction = DEFAULT_MIN_WIDTH):
        self._gens: list[_Generator] = []
        self._index: dict[str, int] = {}
        self.min_width = Fraction(min_width)
        for name in names:
            self.declare(name)

    def __len__(self) -> int:
        return len(self._gens)

    def __repr__(self) -> str:
        return f"BasisRegistry({self.names!r})"

    @property
    def names(self) -> list[str]:
        return [g.name for g in self._gens]

    def declare(self, name: str) -> None:
        if name in self._index:
            return
        if name in _DERIVED:
            for dep in _DERIVED[name][1]:
                self.declare(dep)
            return
        if name not in _PRIMITIVES:
            raise KeyError(f"unknown constant {name!r}; catalog: {', '.join(CATALOG)}")
        self._index[name] = len(self._gens)
        self._gens.append(_Generator(name, lru_cache(maxsize=64)(_PRIMITIVES[name])))

    def index(self, name: str) -> int:
        return self._index[name]

    def floor_scaled(self, i: int, k: int) -> int:
        return self._gens[i].floor_scaled(k)

    def approx(self, i: int) -> float:
        """Generator value to within one ulp (from the 64-bit enclosure)."""
        return self._gens[i].floor_scaled(64) / 2.0**64

    def const(self, name: str) -> SymReal:
        """The catalog constant ``name`` as a SymReal (declaring it if needed)."""
        self.declare(name)
        if name in _DERIVED:
            rat, parts = _DERIVED[name]
            out = SymReal(rat, (), self)
            for dep, q in parts.items():
                out = out + self.const(dep) * q
            return out
        i = self._index[name]
        coeffs = [Fraction(0)] * i + [Fraction(1)]
        return SymReal(Fraction(0), tuple(coeffs), self)


DEFAULT_REGISTRY = BasisRegistry(["sqrt2", "sqrt3", "sqrt5", "pi"])


def _as_fraction(v) -> Fraction | None:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)) and not isinstance(v, bool):
        return Fraction(v)
    return None


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class SymReal:
    """Immutable exact real ``rat + sum(coeffs[i] * generator_i)``."""

    __slots__ = ("rat", "coeffs", "reg", "_hash")

    def __init__(self, rat=0, coeffs: Sequence = (), reg: BasisRegistry | None = None):
        self.rat = Fraction(rat)
        self.coeffs = _trim([Fraction(c) for c in coeffs])
        self.reg = reg if reg is not None else DEFAULT_REGISTRY
        self._hash = None

    @classmethod
    def _raw(cls, rat: Fraction, coeffs: tuple, reg: BasisRegistry) -> SymReal:
        obj = cls.__new__(cls)
        obj.rat = rat
        obj.coeffs = coeffs
        obj.reg = reg
        obj._hash = None
        return obj

    # -- structure --
    @property
    def is_rational(self) -> bool:
        return not self.coeffs

    def coefficient_vector(self) -> tuple[Fraction, ...]:
        """(rational part, coeff_0, ..., coeff_{n-1}) padded to the registry size."""
        pad = len(self.reg) - len(self.coeffs)
        return (self.rat, *self.coeffs, *([Fraction(0)] * pad))

    def __eq__(self, other) -> bool:
        if isinstance(other, SymReal):
            return self.reg is other.reg and self.rat == other.rat and self.coeffs == other.coeffs
        q = _as_fraction(other)
        if q is not None:
            return not self.coeffs and self.rat == q
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rat, self.coeffs)) if self.coeffs else hash(self.rat)
        return self._hash

    def __repr__(self) -> str:
        parts = []
        if self.rat or not self.coeffs:
            parts.append(str(self.rat))
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}*{self.reg._gens[i].name}")
        return "SymReal(" + " + ".join(parts) + ")"

    def __str__(self) -> str:
        return repr(self)[8:-1]

    # -- arithmetic --
    def _coerce(self, other) -> SymReal | None:
        if isinstance(other, SymReal):
            if other.reg is not self.reg:
                raise ValueError("SymReals from different registries")
            return other
        q = _as_fraction(other)
        if q is not None:
            return SymReal._raw(q, (), self.reg)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) + other
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not b:
            return SymReal._raw(self.rat + o.rat, a, self.reg)
        if not a:
            return SymReal._raw(self.rat + o.rat, b, self.reg)
        if len(a) < len(b):
            a, b = b, a
        merged = list(a)
        for i, c in enumerate(b):
            merged[i] = merged[i] + c
        return SymReal._raw(self.rat + o.rat, _trim(merged), self.reg)

    __radd__ = __add__

    def __neg__(self) -> SymReal:
        return SymReal._raw(-self.rat, tuple(-c for c in self.coeffs), self.reg)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) - other
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        q = _as_fraction(other)
        if q is None and isinstance(other, SymReal):
            if other.reg is not self.reg:
                raise ValueError("SymReals from different registries")
            if other.is_rational:
                q = other.rat
            elif self.is_rational:
                return other * self.rat
            else:
                raise TypeError("product of two irrational SymReals is not representable")
        if q is None:
            if isinstance(other, float):
                return float(self) * other
            return NotImplemented
        if not q:
            return SymReal._raw(Fraction(0), (), self.reg)
        return SymReal._raw(self.rat * q, tuple(c * q for c in self.coeffs), self.reg)

    __rmul__ = __mul__

    def __truediv__(self, other):
        q = _as_fraction(other)
        if q is None and isinstance(other, SymReal) and other.is_rational:
            q = other.rat
        if q is None:
            if isinstance(other, float):
                return float(self) / other
            return NotImplemented
        return self * (1 / q)

    # -- order and conversion --
    def __float__(self) -> float:
        if not self.coeffs:
            return float(self.rat)
        lo, hi = _bounds(self, 64)
        return float(Fraction(lo + hi, 1 << 65))

    def __floor__(self) -> int:
        return sym_floor(self)

    def __lt__(self, other):
        return sym_compare(self, other) < 0

    def __le__(self, other):
        return sym_compare(self, other) <= 0

    def __gt__(self, other):
        return sym_compare(self, other) > 0

    def __ge__(self, other):
        return sym_compare(self, other) >= 0

    def frac(self) -> SymReal:
        return sym_frac(self)


def const(name: str, registry: BasisRegistry | None = None) -> SymReal:
    return (registry or DEFAULT_REGISTRY).const(name)


def sym(value, registry: BasisRegistry | None = None) -> SymReal:
    """Coerce an int, Fraction, rational string (``"3/4"``) or SymReal."""
    if isinstance(value, SymReal):
        return value
    if isinstance(value, str):
        value = Fraction(value)
    q = _as_fraction(value)
    if q is None:
        raise TypeError(f"cannot make an exact SymReal from {value!r}")
    return SymReal._raw(q, (), registry or DEFAULT_REGISTRY)


_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*?)([A-Za-z]\w*)?(?:/(\d+))?")


def parse_sym(text: str, registry: BasisRegistry | None = None) -> SymReal:
    """Parse sums of terms like ``"1/2 + 1/2*sqrt5"``, ``"sqrt2-1"`` or ``"-3*pi/4"``."""
    reg = registry or DEFAULT_REGISTRY
    body = text.replace(" ", "")
    if not body:
        raise ValueError("empty expression")
    out = SymReal._raw(Fraction(0), (), reg)
    pos = 0
    while pos < len(body):
        m = _TERM.match(body, pos)
        if m is None or m.end() == pos or not (m.group(2) or m.group(4)):
            raise ValueError(f"cannot parse {text!r} at offset {pos}")
        sign, num, star, name, den = m.groups()
        if star and not (num and name):
            raise ValueError(f"dangling '*' in {text!r}")
        q = Fraction(num) if num else Fraction(1)
        if name and name not in CATALOG:
            raise ValueError(f"unknown constant {name!r} in {text!r}; catalog: {', '.join(CATALOG)}")
        if den:
            q /= int(den)
        if sign == "-":
            q = -q
        out = out + (reg.const(name) * q if name else q)
        pos = m.end()
        if pos < len(body) and body[pos] not in "+-":
            raise ValueError(f"cannot parse {text!r} at offset {pos}")
    return out


# -- enclosures --------------------------------------------------------------


def _bounds(x: SymReal, k: int) -> tuple[int, int]:
    """Integers (L, U) with L <= x * 2**k <= U."""
    p, q = x.rat.numerator, x.rat.denominator
    lo = (p << k) // q
    hi = -((-p << k) // q)
    reg = x.reg
    for i, c in enumerate(x.coeffs):
        if not c:
            continue
        a, b = c.numerator, c.denominator
        g = reg.floor_scaled(i, k)
        if a > 0:
            lo += (a * g) // b
            hi += -((-a * (g + 1)) // b)
        else:
            lo += (a * (g + 1)) // b
            hi += -((-a * g) // b)
    return lo, hi


def sym_fixed(x: SymReal, bits: int) -> tuple[int, int]:
    """Integers (L, U) with L <= x * 2**bits <= U and U - L small (a few units)."""
    if bits < 0:
        raise ValueError("bits must be nonnegative")
    return _bounds(x, bits)


def _budget_bits(x: SymReal) -> int:
    weight = 2 + sum(abs(c) for c in x.coeffs)
    return math.ceil(math.log2(weight / x.reg.min_width)) + 2


def sym_eval(x: SymReal, eps) -> tuple[Fraction, Fraction]:
    """Rational interval of width <= eps containing x.

    Intervals are nested: a smaller eps never yields an interval that pokes
    outside the one returned for a larger eps.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if x.is_rational:
        return x.rat, x.rat
    k = 1
    while True:
        lo, hi = _bounds(x, k)
        if Fraction(hi - lo, 1 << k) <= eps:
            return Fraction(lo, 1 << k), Fraction(hi, 1 << k)
        k += 1 if k < 8 else k // 2


def _float_estimate(x: SymReal) -> tuple[float, float]:
    """Float value and a generous bound on its error.

    Every term carries relative error below 2**-50, so 1e-13 times the sum
    of absolute terms over-covers the accumulated rounding.
    """
    reg = x.reg
    v = float(x.rat)
    mag = abs(v)
    for i, c in enumerate(x.coeffs):
        if c:
            t = float(c) * reg.approx(i)
            v += t
            mag += abs(t)
    return v, 1e-13 * mag + 1e-300


def sym_floor(x: SymReal) -> int:
    if x.is_rational:
        return math.floor(x.rat)
    v, err = _float_estimate(x)
    if math.isfinite(v):
        m = math.floor(v - err)
        if m == math.floor(v + err):
            return m
    k_max = _budget_bits(x)
    k = 64
    while True:
        lo, hi = _bounds(x, k)
        m = lo >> k
        if hi < (m + 1) << k:
            return m
        if k >= k_max:
            raise PrecisionExhausted(f"floor of {x} undecided at enclosure width {x.reg.min_width}")
        k = min(2 * k, k_max)


def sym_frac(x: SymReal) -> SymReal:
    """x - floor(x), in [0, 1); only the rational part changes."""
    n = sym_floor(x)
    if not n:
        return x
    return SymReal._raw(x.rat - n, x.coeffs, x.reg)


def sym_compare(a, b) -> int:
    """-1, 0 or 1.  Equal exactly when the coefficient vectors coincide."""
    if not isinstance(a, SymReal):
        a = sym(a, b.reg if isinstance(b, SymReal) else None)
    d = a - b
    if d.is_rational:
        return (d.rat > 0) - (d.rat < 0)
    v, err = _float_estimate(d)
    if abs(v) > err and math.isfinite(v):
        return 1 if v > 0 else -1
    k_max = _budget_bits(d)
    k = 64
    while True:
        lo, hi = _bounds(d, k)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if k >= k_max:
            raise RefinementBudgetExceeded(
                f"{a} vs {b}: difference not separated from 0 at width {d.reg.min_width}"
            )
        k = min(2 * k, k_max)


# -- rational independence ---------------------------------------------------


@dataclass(frozen=True)
class IndependenceVerdict:
    """``witness`` is (n0, n1, ..., nk) with n0 + sum(n_i * x_i) = 0, or None."""

    independent: bool
    witness: tuple[int, ...] | None = None

    def __str__(self) -> str:
        return "independent" if self.independent else f"dependent{self.witness}"


def _nullspace_vector(cols: list[list[Fraction]]) -> list[Fraction] | None:
    """A nonzero rational vector v with sum(v_j * cols[j]) = 0, or None."""
    nrows = len(cols[0])
    ncols = len(cols)
    m = [[cols[j][i] for j in range(ncols)] for i in range(nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    v = [Fraction(0)] * ncols
    v[f] = Fraction(1)
    for row, c in enumerate(pivots):
        v[c] = -m[row][f]
    return v


def rational_independence(xs: Sequence[SymReal]) -> IndependenceVerdict:
    """Decide whether 1, xs[0], ..., xs[k-1] are linearly independent over Q."""
    if not xs:
        raise ValueError("need at least one number")
    xs = [sym(x) if not isinstance(x, SymReal) else x for x in xs]
    reg = xs[0].reg
    one = SymReal._raw(Fraction(1), (), reg)
    cols = [list(y.coefficient_vector()) for y in [one, *xs]]
    width = max(len(c) for c in cols)
    cols = [c + [Fraction(0)] * (width - len(c)) for c in cols]
    v = _nullspace_vector(cols)
    if v is None:
        return IndependenceVerdict(True)
    scale = math.lcm(*(q.denominator for q in v))
    ints = [int(q * scale) for q in v]
    g = math.gcd(*ints)
    ints = [n // g for n in ints]
    lead = next(n for n in ints if n)
    if lead < 0:
        ints = [-n for n in ints]
    return IndependenceVerdict(False, tuple(ints))
