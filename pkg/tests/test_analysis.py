from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minprod.analysis import (
    FactorNotMinimal, component_swap_certificate, fiber_transitivity_check, geometric_bound, hitting_sets,
    invariant_function_witness, minimality_scan, periodic_recurrence_check, s3_subgroup_deviation,
    suspension_group_law, syndetic_gaps, td_ab_system, torus_product_certificate, transitivity_scan,
    two_circles_certificate, weyl_ratio, weyl_test,
)
from minprod.cocycles import anzai_cocycle, zero_cocycle
from minprod.combinators import direct_product, skew_product
from minprod.dynsys import (
    Ball, Circle, Finite, LinearFlow, Torus, circle_rotation, circle_subgroup_element, cyclic_system, odometer,
    s3_translation, torus_rotation, two_circles_base, two_circles_skew,
)
from minprod.symreal import const, sym

R2, R3, R5 = const("sqrt2"), const("sqrt3"), const("sqrt5")


def max_gap_oracle(alpha_mp, n: int):
    """Largest gap between the first n points of k*alpha mod 1."""
    pts = sorted(mpmath.frac(k * alpha_mp) for k in range(n))
    return max(max(b - a for a, b in zip(pts, pts[1:])), 1 - pts[-1] + pts[0])


def test_scan_rational_rotation_examples():
    rep = minimality_scan(circle_rotation(Fraction(1, 5)), eps=0.05)
    assert rep.verdict == "fail"
    assert rep.evidence["orbit_cardinality"] == 5
    assert rep.obstruction.kind == "finite-orbit"
    assert float(rep.witness.s) % 0.2 == pytest.approx(0.1)


def test_scan_sqrt2_passes_where_gaps_are_small():
    # three-distance oracle: the first 1000 multiples already leave no gap of 0.01
    mpmath.mp.dps = 40
    assert max_gap_oracle(mpmath.sqrt(2), 1000) < 0.01
    rep = minimality_scan(circle_rotation(R2), eps=0.01, horizon=10**4)
    assert rep.verdict == "pass"


def test_scan_cyclic_pass_with_short_horizon():
    rep = minimality_scan(cyclic_system(3), eps=0.4, horizon=3)
    assert rep.verdict == "pass" and rep.evidence["steps_scanned"] <= 3


def test_scan_unknown_shortfall_is_inconclusive():
    rep = minimality_scan(circle_rotation(R2), eps=0.001, horizon=50, samples=2)
    assert rep.verdict == "inconclusive" and rep.obstruction is None


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([0.3, 0.2, 0.1, 0.05]), st.sampled_from([200, 1000, 5000]), st.integers(0, 3))
def test_scan_is_monotone(eps, horizon, seed):
    S = torus_rotation([R2, R3])
    rep = minimality_scan(S, eps, horizon, samples=3, seed=seed)
    if rep.verdict == "pass":
        assert minimality_scan(S, eps * 1.5, horizon, 3, seed).verdict == "pass"
        assert minimality_scan(S, eps, horizon * 2, 3, seed).verdict == "pass"


def test_certificate_examples():
    assert torus_product_certificate([R2], [R3]).verdict == "minimal"
    rep = torus_product_certificate([R2], [R2])
    assert rep.verdict == "nonminimal"
    k, l = rep.witness["k"], rep.witness["l"]
    assert (k, l) in (([1], [-1]), ([-1], [1]))
    rep = torus_product_certificate([R2], [R2 + Fraction(1, 2)])
    assert rep.verdict == "nonminimal"
    assert rep.evidence["relation"] in ([1, 2, -2], [-1, -2, 2])
    assert rep.evidence["relation_is_zero"]
    with pytest.raises(FactorNotMinimal):
        torus_product_certificate([R2], [sym(Fraction(1, 3))])


@pytest.mark.parametrize("alpha, k, want", [(Fraction(1, 2), 2, 1.0), (Fraction(0), 1, 1.0), (Fraction(0), 3, 1.0),
                                            (Fraction(1, 3), 1, 0.0)])
def test_weyl_rational_examples(alpha, k, want):
    n = 999
    assert weyl_ratio(sym(alpha), k, "n", n) == pytest.approx(want, abs=1e-12)


def test_weyl_sqrt2_within_geometric_bound():
    rep = weyl_test(R2, "n", 5, 10**5)
    assert rep.verdict == "pass"
    for k in range(1, 6):
        assert weyl_ratio(R2, k, "n", 10**5) <= geometric_bound(R2, k, 10**5)
    assert weyl_test(sym(Fraction(1, 2)), "n", 5, 10**5).witness["character"] == 2


def _mp_ratio(alpha_mp, k, idx):
    s = mpmath.fsum(mpmath.expjpi(2 * k * m * alpha_mp) for m in idx)
    return float(abs(s) / len(idx))


@pytest.mark.parametrize("indices, fn", [("n", lambda m: m), ("n^2", lambda m: m * m), ("n^3", lambda m: m**3),
                                         ("2^n", lambda m: 2**m)])
@pytest.mark.parametrize("k", [1, 3])
def test_weyl_matches_mpmath(indices, fn, k):
    mpmath.mp.dps = 50 if indices != "2^n" else 400
    n = 300
    alpha = R2 + R3 / 3
    a_mp = mpmath.sqrt(2) + mpmath.sqrt(3) / 3
    want = _mp_ratio(a_mp, k, [fn(m) for m in range(1, n + 1)])
    assert weyl_ratio(alpha, k, indices, n) == pytest.approx(want, abs=1e-9)


def test_transitivity_examples():
    S = circle_rotation(Fraction(1, 4))
    U, V = Ball(Circle(sym(0)), 0.05), Ball(Circle(sym(Fraction(1, 2))), 0.05)
    hs = hitting_sets(S, [(U, V)], 40)[0]
    assert hs.times[:5] == [2, 6, 10, 14, 18] and all(t % 4 == 2 for t in hs.times)

    C = cyclic_system(2)
    hs = hitting_sets(C, [(Ball(Finite(0, 2), 0.5), Ball(Finite(1, 2), 0.5))], 21)[0]
    assert hs.times == list(range(1, 22, 2))

    ident = circle_rotation(0)
    pairs = [(Ball(Circle(sym(Fraction(1, 8))), 0.05), Ball(Circle(sym(Fraction(5, 8))), 0.05))]
    _, rep = transitivity_scan(ident, pairs=pairs, horizon=100)
    assert rep.verdict == "fail"


def test_transitivity_anzai_passes():
    _, rep = transitivity_scan(skew_product(circle_rotation(R2), anzai_cocycle()), eps=0.25, horizon=5000)
    assert rep.verdict == "pass"


def test_syndetic_examples():
    flow = LinearFlow([1, R2])
    V, V2 = Ball(Torus((sym(0), sym(0))), 0.1), Ball(Torus((sym(Fraction(1, 2)), sym(Fraction(1, 2)))), 0.1)
    rep = syndetic_gaps(flow, V, V2, Fraction(200), Fraction(1, 10))
    assert rep.verdict == "pass" and rep.evidence["max_gap"] < 15
    whole = Ball(Torus((sym(0), sym(0))), 1.0)
    rep = syndetic_gaps(flow, V, whole, Fraction(20), Fraction(1, 10))
    assert rep.evidence["max_gap"] == pytest.approx(0.1)
    rational = LinearFlow([1, 1])
    off = Ball(Torus((sym(Fraction(1, 2)), sym(0))), 0.1)
    rep = syndetic_gaps(rational, V, off, Fraction(200), Fraction(1, 10))
    assert rep.evidence["hits"] == 0 and rep.evidence["max_gap"] == pytest.approx(200)
    assert rep.verdict != "pass"


@pytest.mark.parametrize("a, b, t0", [(1, 1, R2), (2, 3, R2), (-1, 4, R3 / 2), (0, 5, R5)])
def test_invariant_function_witness(a, b, t0):
    rep = invariant_function_witness(a, b, t0, iterates=100, points=100)
    assert rep.verdict == "pass"
    scan = minimality_scan(td_ab_system(a, b, t0), eps=0.05, horizon=10**5, samples=4)
    assert scan.verdict == "fail"


def test_recurrence_odometer_periods():
    rep = periodic_recurrence_check(odometer(2, 10), depth=10)
    assert rep.verdict == "pass"
    assert [e["period"] for e in rep.evidence["entries"]] == [2**m for m in range(11)]
    assert all(e["exact"] for e in rep.evidence["entries"])


def test_recurrence_identity_fixed_point():
    rep = periodic_recurrence_check(circle_rotation(0), depth=6)
    assert rep.verdict == "pass"
    assert {e["period"] for e in rep.evidence["entries"]} == {1}


def _convergent_denominators(limit: int) -> list[int]:
    # sqrt2 = [1; 2, 2, 2, ...]
    q0, q1 = 1, 2
    out = [q0, q1]
    while q1 < limit:
        q0, q1 = q1, 2 * q1 + q0
        out.append(q1)
    return out


def test_recurrence_irrational_uses_convergents():
    rep = periodic_recurrence_check(circle_rotation(R2), depth=8, max_period=4096)
    assert rep.verdict == "fail"
    dens = set(_convergent_denominators(4096))
    for e in rep.evidence["entries"]:
        if e["period"] is not None and e["radius"] < 0.25:
            assert e["period"] in dens
            assert e["drift"] * 16 <= e["radius"] + 1e-12


def test_fiber_transitivity_examples():
    base = circle_rotation(R2)
    assert fiber_transitivity_check(skew_product(base, anzai_cocycle()), eps=0.05).verdict == "pass"
    assert fiber_transitivity_check(skew_product(base, zero_cocycle()), eps=0.05, horizon=10**4).verdict == "fail"
    assert fiber_transitivity_check(direct_product(base, circle_rotation(R3)), eps=0.05).verdict == "pass"


def test_two_circle_certificates():
    F = two_circles_skew(R2, R3)
    rep = two_circles_certificate(F, R2, R3)
    assert rep.verdict == "pass"
    rep = component_swap_certificate(two_circles_base(R2), two_circles_base(R3))
    assert rep.verdict == "pass"


def test_s3_deviation():
    S = s3_translation(circle_subgroup_element(R2 - 1), R2 - 1)
    rep = s3_subgroup_deviation(S, 10**4)
    assert rep.verdict == "pass" and rep.evidence["max_deviation"] <= 1e-6


def test_suspension_group_law_report():
    rep = suspension_group_law(odometer(2, 6), samples=100)
    assert rep.verdict == "pass"
