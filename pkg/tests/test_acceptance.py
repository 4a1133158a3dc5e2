"""Acceptance suite: one test per criterion, each with its runtime budget."""

from __future__ import annotations

import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from _cases import random_base, random_cocycle, random_real
from minprod import analysis as an
from minprod.angles import arc, is_exact, mod1
from minprod.cocycles import build_transitive_cocycle, invariant_check, iterate_cocycle, sine_cocycle, verify_build
from minprod.combinators import check_equivariance, direct_product, klein_quotient, skew_product, verify_factor
from minprod.dynsys import (
    Circle, Quaternion, circle_rotation, circle_subgroup_element, denjoy_system, odometer, s3_translation, two_circles_base, two_circles_skew,
)
from minprod.gallery import GALLERY, run_experiment
from minprod.gallery.catalog import BATTERY, DEPENDENT_CASES, INDEPENDENT_CASES, builder_pairs
from minprod.gallery.config import evaluate
from minprod.symreal import SymReal, const, sym

R2, R3 = const("sqrt2"), const("sqrt3")
HALF = Fraction(1, 2)


class Budget:
    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f} s, budget {self.seconds} s"


def _battery():
    return [tuple(evaluate(side) for side in case) for case in BATTERY]


@pytest.mark.criterion(1)
def test_c01_certificate_battery():
    cases = _battery()
    with Budget(1):
        reps = [an.torus_product_certificate(x, g) for x, g in cases]
    planted = ["minimal"] * len(INDEPENDENT_CASES) + ["nonminimal"] * len(DEPENDENT_CASES)
    assert len(cases) == 20
    assert [r.verdict for r in reps] == planted
    for (x, g), r in zip(cases, reps):
        if r.verdict != "nonminimal":
            continue
        w = r.evidence["relation"]
        assert w == [r.witness["offset"], *r.witness["k"], *r.witness["l"]]
        assert any(w[1:]) and len(w) == 1 + len(x) + len(g)
        total = sum((c * v for c, v in zip([sym(1), *x, *g], w)), sym(0))
        assert isinstance(total, SymReal) and total == 0 and total.is_rational


@pytest.mark.criterion(2)
def test_c02_certificate_scan_coherence():
    cases = _battery()
    assert all(len(x) + len(g) <= 3 for x, g in cases)
    with Budget(120):
        rep = an.certificate_scan_coherence(cases, eps=0.02, horizon=10**6, samples=16, seed=0)
    assert rep.verdict == "pass"
    assert rep.evidence["coherent"] == 20
    # every agreement is at the scan's resolution, none is excused by a too-coarse net
    assert rep.evidence["below_resolution"] == 0


@pytest.mark.criterion(3)
def test_c03_rational_rotation():
    with Budget(1):
        for q in range(1, 65):
            rep = an.minimality_scan(circle_rotation(sym(Fraction(1, q))), eps=0.005, horizon=10**6, samples=1)
            assert rep.verdict == "fail", q
            assert rep.obstruction.kind == "finite-orbit"
            assert rep.evidence["orbit_cardinality"] == q
            assert rep.obstruction.details["distance_exact"] == Fraction(1, 2 * q)


def _mp_bound(alpha_mp, k: int, n: int):
    return mpmath.mpf("1.1") / (n * abs(mpmath.sin(mpmath.pi * k * alpha_mp)))


@pytest.mark.criterion(4)
def test_c04_weyl():
    n = 10**5
    with Budget(5):
        rep = an.weyl_test(R2, "n", 5, n)
        ratios = [an.weyl_ratio(R2, k, "n", n) for k in range(1, 6)]
        half = an.weyl_test(sym(HALF), "n", 5, n)
    assert rep.verdict == "pass"
    for k, r in enumerate(ratios, start=1):
        assert r <= float(_mp_bound(mpmath.sqrt(2), k, n))
    assert half.verdict == "fail"
    assert half.witness["character"] == 2
    assert an.weyl_ratio(sym(HALF), 2, "n", n) == 1.0


@pytest.mark.criterion(5)
def test_c05_cocycle_identity():
    rng = np.random.default_rng(2024)
    worst = 0.0
    with Budget(5):
        for i in range(100):
            f, exact = random_cocycle(rng)
            S = random_base(rng)
            y = S.space.sample(1, i)[0]
            k, n = int(rng.integers(1, 51)), int(rng.integers(1, 51))
            lhs = iterate_cocycle(f, S, y, k + n)
            rhs = [mod1(a + b) for a, b in zip(iterate_cocycle(f, S, S.iterate(y, k), n), iterate_cocycle(f, S, y, k))]
            for a, b in zip(lhs, rhs):
                if exact:
                    assert is_exact(a) and a == b
                else:
                    worst = max(worst, arc(float(a), float(b)))
    assert worst < 1e-9


@pytest.mark.criterion(6)
def test_c06_suspension():
    with Budget(5):
        rep = an.suspension_group_law(odometer(2, 10), samples=1000, seed=0)
    assert rep.verdict == "pass"
    assert rep.evidence["group_law_failures"] == 0 and rep.evidence["unit_time_failures"] == 0


@pytest.mark.criterion(7)
def test_c07_denjoy():
    with Budget(60):
        S, fm = denjoy_system(R2, HALF, 200)
        rep = verify_factor(fm, samples=1000, horizon=1000, seed=0)
        off_orbit = [len(fm.fiber_probe(Circle(sym(Fraction(j, 997))))) for j in range(1, 997)]
        scan = an.minimality_scan(S, eps=0.02, horizon=10**6, samples=16)
    ev = rep.evidence
    assert ev["semiconjugacy_defect"] == 0.0 and ev["defect_exact"]
    assert ev["singular_probes"] == 401 and ev["singular_fiber_sizes"] == {2: 401}
    assert set(ev["net_fiber_sizes"]) == {1}
    assert set(off_orbit) == {1}
    assert scan.verdict == "pass"


@pytest.mark.criterion(8)
def test_c08_klein_bottle():
    with Budget(120):
        inv = invariant_check(sine_cocycle(Fraction(3, 10)))
        P = skew_product(circle_rotation(R2), sine_cocycle(256))
        ev = check_equivariance(P)
        scan = an.minimality_scan(klein_quotient(P), eps=0.05, horizon=10**6, samples=16)
    assert inv.verdict == "pass" and inv.evidence["defect"] <= 1e-12
    assert ev["exact"]
    assert scan.verdict == "pass"


@pytest.mark.criterion(9)
def test_c09_td_ab_nonminimal():
    rng = np.random.default_rng(9)
    with Budget(30):
        for i in range(10):
            a, b = 0, 0
            while a == 0 and b == 0:
                a, b = int(rng.integers(-5, 6)), int(rng.integers(-5, 6))
            t0 = random_real(rng)
            rep = an.invariant_function_witness(a, b, t0, iterates=1000, points=1000, seed=i)
            assert rep.verdict == "pass" and rep.evidence["identity_is_zero"], (a, b, t0)
            scan = an.minimality_scan(an.td_ab_system(a, b, t0), eps=0.05, horizon=10**5, samples=4)
            assert scan.verdict == "fail", (a, b, t0)
            ob = scan.obstruction
            k = ob.details["character"]
            # the character is a nonzero multiple of (b, -a)
            assert k[0] * -a == k[1] * b and any(k)
            assert ob.details["level_offset"] != 0 and ob.details["distance_lower_bound"] > 0


@pytest.mark.criterion(10)
def test_c10_two_circles():
    with Budget(30):
        F = two_circles_skew(R2, R3)
        cert = an.two_circles_certificate(F, R2, R3)
        indep = an.torus_product_certificate([R2], [R3])
        _, trans = an.transitivity_scan(F, 0.25, 10_000)
        swaps = [an.component_swap_certificate(A, B) for A, B in [
            (two_circles_base(R2), two_circles_base(R3)),
            (two_circles_base(R3), two_circles_base(R2 / 3)),
            (two_circles_base(R2 + R3), two_circles_base(R2)),
        ]]
    assert cert.evidence["four_cycle"] and cert.evidence["fourth_power_exact"] and cert.verdict == "pass"
    assert indep.verdict == "minimal"
    assert trans.verdict == "pass"
    for s in swaps:
        assert s.verdict == "pass" and s.evidence["diagonal_union_invariant"]


@pytest.mark.criterion(11)
def test_c11_s3():
    theta = R2 - 1
    with Budget(10):
        S = s3_translation(circle_subgroup_element(theta))
        dev = an.s3_subgroup_deviation(S, 10**5)
        scan = an.minimality_scan(S, eps=0.5, horizon=10**5, samples=4)
    assert dev.evidence["max_deviation"] <= 1e-6
    assert scan.verdict == "fail"
    assert scan.witness == Quaternion(0, 0, 1, 0)
    assert scan.obstruction.details["distance_exact"] == R2


@pytest.mark.criterion(12)
def test_c12_periodic_recurrence_product():
    with Budget(60):
        rec = an.periodic_recurrence_check(odometer(2, 10), depth=10)
        scan = an.minimality_scan(direct_product(odometer(2, 10), circle_rotation(R2)), eps=0.05, horizon=10**6,
                                  samples=16)
    entries = rec.evidence["entries"]
    assert rec.verdict == "pass"
    assert [e["period"] for e in entries] == [2**m for m in range(11)]
    assert all(e["exact"] for e in entries)
    assert scan.verdict == "pass"


@pytest.mark.criterion(13)
def test_c13_builder():
    base = circle_rotation(R2)
    pairs = [tuple(evaluate(p)) for p in builder_pairs()]
    assert len(pairs) == 8 and all(U.radius == 0.1 and V.radius == 0.1 for U, V in pairs)
    with Budget(300):
        res = build_transitive_cocycle(base, pairs, budget=64)
        checks = verify_build(res, pairs)
        fib = an.fiber_transitivity_check(skew_product(base, res.cocycle), None, 0.1, 10**6)
    assert res.complete and len(res.perturbations) <= 64
    assert checks.verdict == "pass"
    assert fib.verdict == "pass"


@pytest.mark.criterion(14)
def test_c14_determinism():
    first = {e.name: run_experiment(e).payload_hash for e in GALLERY}
    second = {e.name: run_experiment(e).payload_hash for e in GALLERY}
    assert first == second
    assert len(first) == len(GALLERY) >= 12
