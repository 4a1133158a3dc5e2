from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from minprod.symreal import (
    PrecisionExhausted, RefinementBudgetExceeded, SymReal, const, parse_sym, rational_independence, sym, sym_compare, sym_eval,
    sym_fixed, sym_floor, sym_frac,
)

ORACLE = {"sqrt2": mpmath.sqrt(2), "sqrt3": mpmath.sqrt(3), "sqrt5": mpmath.sqrt(5),
          "golden": (1 + mpmath.sqrt(5)) / 2, "pi": mpmath.pi}
NAMES = ["sqrt2", "sqrt3", "sqrt5", "pi"]

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=64)


def mp_value(x: SymReal):
    v = mpmath.mpf(x.rat.numerator) / x.rat.denominator
    for name, c in zip(x.reg.names, x.coeffs):
        v += mpmath.mpf(c.numerator) / c.denominator * ORACLE[name]
    return v


@st.composite
def symreals(draw):
    x = sym(draw(fractions))
    for name in draw(st.lists(st.sampled_from(NAMES), max_size=3)):
        x = x + const(name) * draw(fractions)
    return x


def test_eval_rational_is_exact():
    assert sym_eval(sym(Fraction(3, 4)), Fraction(1, 100)) == (Fraction(3, 4), Fraction(3, 4))


@pytest.mark.parametrize("x, eps, inside", [
    (const("sqrt2"), Fraction(1, 1000), Fraction(141421356, 10**8)),
    (1 + 2 * const("sqrt2"), Fraction(1, 10), Fraction(38284, 10**4)),
])
def test_eval_examples(x, eps, inside):
    lo, hi = sym_eval(x, eps)
    assert hi - lo <= eps
    assert lo <= inside <= hi


@settings(max_examples=60, deadline=None)
@given(symreals(), st.integers(1, 80))
def test_eval_contains_oracle_value(x, bits):
    eps = Fraction(1, 2**bits)
    lo, hi = sym_eval(x, eps)
    v = mp_value(x)
    assert hi - lo <= eps
    assert mpmath.mpf(lo.numerator) / lo.denominator <= v <= mpmath.mpf(hi.numerator) / hi.denominator


@settings(max_examples=40, deadline=None)
@given(symreals(), st.integers(1, 40), st.integers(1, 40))
def test_eval_intervals_nest(x, a, b):
    wide, narrow = sorted([a, b])
    lo1, hi1 = sym_eval(x, Fraction(1, 2**wide))
    lo2, hi2 = sym_eval(x, Fraction(1, 2**narrow))
    assert lo1 <= lo2 <= hi2 <= hi1


@settings(max_examples=40, deadline=None)
@given(symreals(), st.integers(0, 100))
def test_fixed_point_bounds(x, bits):
    lo, hi = sym_fixed(x, bits)
    v = mp_value(x) * 2**bits
    assert lo <= v <= hi
    assert hi - lo <= 2 + 2 * sum(abs(c) for c in x.coeffs)


@pytest.mark.parametrize("x, want", [
    (sym(Fraction(7, 4)), sym(Fraction(3, 4))),
    (const("sqrt2"), const("sqrt2") - 1),
    (sym(Fraction(-1, 3)), sym(Fraction(2, 3))),
])
def test_frac_examples(x, want):
    assert sym_frac(x) == want


@settings(max_examples=60, deadline=None)
@given(symreals(), st.integers(-1000, 1000))
def test_frac_is_shift_invariant(x, n):
    assert sym_frac(x + n) == sym_frac(x)
    assert sym_frac(x).coefficient_vector()[1:] == x.coefficient_vector()[1:]


@settings(max_examples=60, deadline=None)
@given(symreals())
def test_floor_matches_oracle(x):
    assert sym_floor(x) == int(mpmath.floor(mp_value(x)))


def _pell(limit: int) -> tuple[int, int]:
    # a^2 - 2 b^2 = +-1, so |a - b*sqrt2| = 1/(a + b*sqrt2)
    a, b = 1, 1
    while a < limit:
        a, b = a + 2 * b, a + b
    return a, b


def test_floor_near_integer_within_budget():
    a, b = _pell(10**31)
    x = sym(a) - const("sqrt2") * b
    assert sym_floor(x) == int(mpmath.floor(mpmath.mpf(a) - b * mpmath.sqrt(2)))


def test_floor_and_compare_exhaust_budget():
    a, b = _pell(10**40)
    x = sym(a) - const("sqrt2") * b
    with pytest.raises(PrecisionExhausted):
        sym_floor(x)
    with pytest.raises(RefinementBudgetExceeded):
        sym_compare(x, 0)


@pytest.mark.parametrize("a, b, want", [
    (sym(Fraction(1, 2)), sym(Fraction(1, 3)), 1),
    (const("sqrt2"), sym(Fraction(707, 500)), 1),
    (2 * const("sqrt2"), const("sqrt2") + const("sqrt2"), 0),
])
def test_compare_examples(a, b, want):
    assert sym_compare(a, b) == want


@settings(max_examples=60, deadline=None)
@given(symreals(), symreals())
def test_compare_matches_oracle(a, b):
    d = mp_value(a) - mp_value(b)
    want = 0 if a == b else (1 if d > 0 else -1)
    assert sym_compare(a, b) == want


def test_independence_examples():
    r2 = const("sqrt2")
    assert rational_independence([r2]).independent
    v = rational_independence([sym(Fraction(1, 3))])
    assert not v.independent and v.witness in ((1, -3), (-1, 3))
    v = rational_independence([r2, r2 + Fraction(1, 2)])
    assert not v.independent and v.witness in ((1, 2, -2), (-1, -2, 2))


def test_golden_is_derived_from_sqrt5():
    v = rational_independence([const("golden"), const("sqrt5")])
    assert not v.independent
    n0, a, b = v.witness
    assert n0 + a * const("golden") + b * const("sqrt5") == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(symreals(), min_size=1, max_size=4), st.randoms(use_true_random=False), st.integers(-5, 5))
def test_independence_invariances(xs, rnd, shift):
    v = rational_independence(xs)
    perm = xs[:]
    rnd.shuffle(perm)
    assert rational_independence(perm).independent == v.independent
    moved = [xs[0] + shift] + xs[1:]
    assert rational_independence(moved).independent == v.independent
    if not v.independent:
        n0, *ns = v.witness
        total = sum((n * x for n, x in zip(ns, xs)), sym(n0))
        assert total == 0
        lo, hi = sym_eval(total, Fraction(1, 10**12)) if not total.is_rational else (total.rat, total.rat)
        assert lo <= 0 <= hi


def test_parse_round_trip():
    x = parse_sym("1/2 + 3*sqrt2 - sqrt3/4")
    assert x == Fraction(1, 2) + 3 * const("sqrt2") - const("sqrt3") / 4
    with pytest.raises(ValueError):
        parse_sym("sqrt7")
