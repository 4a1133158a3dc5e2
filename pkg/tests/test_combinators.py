from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from minprod.angles import mod1
from minprod.cocycles import anzai_cocycle, const_cocycle, iterate_cocycle, sine_cocycle, zero_cocycle
from minprod.combinators import (
    DisjointnessViolation, EquivarianceViolation, RotationNotMinimal, check_equivariance, direct_product,
    identity_factor, klein_involution, klein_quotient, projection_factor, scurve_family, skew_product, verify_factor,
)
from minprod.dynsys import Circle, Finite, KleinClass, Product, Torus, circle_rotation, cyclic_system, denjoy_system, klein_canonical, torus_rotation
from minprod.symreal import const, sym, sym_frac

R2, R3 = const("sqrt2"), const("sqrt3")
HALF = Fraction(1, 2)


def test_identity_product_is_identity():
    I = direct_product(circle_rotation(0), circle_rotation(0))
    for p in I.space.sample(6, seed=0):
        assert I.step(p) == p


def test_product_of_rotations_is_torus_rotation():
    P = direct_product(circle_rotation(R2), circle_rotation(R3))
    T = torus_rotation([R2, R3])
    for p in T.space.sample(6, seed=1):
        q = Product(Circle(p.coords[0]), Circle(p.coords[1]))
        r = P.iterate(q, 7)
        assert (r.left.s, r.right.s) == T.iterate(p, 7).coords


def test_cyclic_square_orbit_is_diagonal():
    P = direct_product(cyclic_system(2), cyclic_system(2))
    orbit = set(P.orbit(Product(Finite(0, 2), Finite(0, 2)), 6))
    assert orbit == {Product(Finite(0, 2), Finite(0, 2)), Product(Finite(1, 2), Finite(1, 2))}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 30))
def test_product_projects_onto_factors(n):
    A, B = circle_rotation(R2), torus_rotation([R3, Fraction(1, 3)])
    P = direct_product(A, B)
    for p in P.space.sample(3, seed=n):
        q = P.iterate(p, n)
        assert q.left == A.iterate(p.left, n) and q.right == B.iterate(p.right, n)


def test_skew_with_zero_cocycle_is_identity_fiber():
    S = skew_product(circle_rotation(R2), zero_cocycle())
    for p in S.space.sample(6, seed=2):
        assert S.step(p).right == p.right


def test_anzai_step():
    S = skew_product(circle_rotation(R2), anzai_cocycle())
    g, z = sym(Fraction(1, 5)), sym_frac(R3)
    q = S.step(Product(Circle(g), Circle(z)))
    assert q == Product(Circle(sym_frac(g + R2)), Circle(sym_frac(z + g)))


@pytest.mark.parametrize("f", [anzai_cocycle(), const_cocycle(R3), const_cocycle([R3, HALF])],
                         ids=["anzai", "const", "const2"])
@pytest.mark.parametrize("n", [1, 2, 9, 25])
def test_skew_fiber_increment_is_iterated_cocycle(f, n):
    base = circle_rotation(R2)
    S = skew_product(base, f)
    for p in S.space.sample(4, seed=n):
        q = S.iterate(p, n)
        inc = iterate_cocycle(f, base, p.left, n)
        z0 = (p.right.s,) if isinstance(p.right, Circle) else p.right.coords
        z1 = (q.right.s,) if isinstance(q.right, Circle) else q.right.coords
        assert tuple(mod1(a + b) for a, b in zip(z0, inc)) == z1


def test_klein_equivariance_examples():
    assert check_equivariance(torus_rotation([R2, HALF]))["exact"]
    P = skew_product(circle_rotation(R2), sine_cocycle(Fraction(3, 10)))
    assert check_equivariance(P)["exact"]
    with pytest.raises(EquivarianceViolation) as err:
        check_equivariance(torus_rotation([R2, R3]))
    assert err.value.witness is not None


def test_klein_canonical_identifies_involution_pairs():
    for g, z in [(sym(Fraction(1, 3)), sym_frac(R2)), (sym(Fraction(5, 7)), sym(0)), (sym_frac(R3), sym(HALF))]:
        assert klein_canonical(*klein_involution(g, z)) == klein_canonical(g, z)
        cg, _ = klein_canonical(g, z)
        assert 0 <= float(cg) < 0.5


def test_klein_quotient_steps_representatives():
    P = torus_rotation([R2, HALF])
    Q = klein_quotient(P)
    for c in Q.space.sample(6, seed=4):
        alt = KleinClass(Torus(klein_canonical(*klein_involution(*c.rep.coords))))
        assert alt == c
        assert Q.step(c) == KleinClass(Torus(klein_canonical(*P.step(c.rep).coords)))


def test_verify_factor_examples():
    S, fm = denjoy_system(R2, HALF, 50)
    rep = verify_factor(fm, samples=8, horizon=50)
    assert rep.verdict == "pass"
    assert rep.evidence["semiconjugacy_defect"] == 0.0 and rep.evidence["defect_exact"]
    assert set(rep.evidence["singular_fiber_sizes"]) == {2}

    rep = verify_factor(identity_factor(circle_rotation(R2)), samples=8, horizon=20)
    assert rep.verdict == "pass" and rep.evidence["semiconjugacy_defect"] == 0.0

    P = direct_product(circle_rotation(R2), circle_rotation(R3))
    rep = verify_factor(projection_factor(P, "left"), samples=8, horizon=20)
    assert rep.evidence["semiconjugacy_defect"] == 0.0
    assert not rep.evidence["almost_one_to_one"]


def test_scurve_membership_and_radii():
    fam = scurve_family([R2 - 1, R3 - 1], Fraction(1, 1000), 100)
    assert fam.evidence["disjoint"]
    assert not fam.membership(fam.centers[fam.indices.index(0)])
    probe = Torus((sym(Fraction(1, 3)), sym(Fraction(2, 7))))
    assert fam.distance_to_discs([[1 / 3, 2 / 7]])[0] > 1e-3
    assert fam.membership(probe)
    assert set(fam.evidence["radius_ratios"]) <= {Fraction(1, 2), Fraction(2)}


def test_scurve_density_evidence():
    fam = scurve_family([R2, R3], Fraction(1, 100), 200)
    dens = fam.density_evidence(0.1)
    assert dens["sup_distance"] <= dens["mesh"]


def test_scurve_rejects_bad_inputs():
    with pytest.raises(DisjointnessViolation):
        scurve_family([R2, R3], Fraction(1, 4), 20)
    with pytest.raises(RotationNotMinimal):
        scurve_family([R2, R2], Fraction(1, 1000), 10)
