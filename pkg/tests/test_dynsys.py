from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minprod.dynsys import (
    CantorSpace, CantorWord, Circle, CircleSpace, Denjoy, Finite, KleinSpace, Product, ProductSpace, Quaternion,
    Solenoid, SphereSpace, Torus, TorusSpace, circle_rotation, circle_subgroup_element, cyclic_system, denjoy_system,
    odometer, s3_translation, suspension_time_t, torus_rotation, two_circles_skew,
)
from minprod.symreal import const, sym, sym_frac

R2, R3 = const("sqrt2"), const("sqrt3")
HALF = Fraction(1, 2)


def word(bits: str) -> CantorWord:
    return CantorWord(tuple(int(c) for c in bits), 2)


def test_circle_rotation_examples():
    quarter = circle_rotation(Fraction(1, 4))
    assert quarter.iterate(Circle(sym(0)), 4) == Circle(sym(0))
    assert circle_rotation(R2).step(Circle(sym(0))) == Circle(R2 - 1)
    ident = circle_rotation(0)
    p = Circle(sym_frac(R3))
    assert ident.step(p) == p


@pytest.mark.parametrize("q", [1, 2, 3, 7, 12, 64])
def test_rational_rotation_period_is_exact(q):
    S = circle_rotation(Fraction(1, q))
    for p in S.space.sample(4, seed=q):
        assert S.iterate(p, q) == p
        assert all(S.iterate(p, j) != p for j in range(1, q))


def test_torus_rotation_examples():
    half = torus_rotation([HALF, HALF])
    p = Torus((sym(Fraction(1, 3)), sym_frac(R2)))
    assert half.iterate(p, 2) == p
    S = torus_rotation([R2, R3])
    assert S.iterate(Torus((sym(0), sym(0))), 2) == Torus((sym_frac(2 * R2), sym_frac(2 * R3)))
    one = torus_rotation([R2]).step(Torus((sym(0),)))
    assert one.coords[0] == circle_rotation(R2).step(Circle(sym(0))).s


def test_inverse_undoes_step_exactly():
    for S in (circle_rotation(R2), torus_rotation([R2, R3]), odometer(3, 5), two_circles_skew(R2, R3)):
        for p in S.space.sample(8, seed=1):
            assert S.inverse(S.step(p)) == p


def test_odometer_examples():
    S = odometer(2, 3)
    assert S.step(word("000")) == word("100")
    assert S.step(word("111")) == word("000")
    assert S.iterate(word("000"), 8) == word("000")
    assert all(S.iterate(word("000"), j) != word("000") for j in range(1, 8))


def test_suspension_examples():
    h = odometer(2, 4)
    y = word("0000")
    half = suspension_time_t(h, HALF)
    assert half.step(Solenoid(y, sym(Fraction(3, 4)))) == Solenoid(h.step(y), sym(Fraction(1, 4)))
    p = Solenoid(word("1010"), sym_frac(R2))
    assert suspension_time_t(h, 0).step(p) == p
    assert suspension_time_t(h, 1).step(Solenoid(y, sym(0))) == Solenoid(h.step(y), sym(0))


@settings(max_examples=40, deadline=None)
@given(st.fractions(-3, 3, max_denominator=16), st.fractions(-3, 3, max_denominator=16), st.integers(0, 15),
       st.fractions(0, Fraction(15, 16), max_denominator=16))
def test_suspension_group_law(s, t, n, height):
    h = odometer(2, 4)
    p = Solenoid(CantorWord.from_int(n, 2, 4), sym(height) + R2 / 8)
    s, t = sym(s) + R3 / 5, sym(t)
    lhs = suspension_time_t(h, s).step(suspension_time_t(h, t).step(p))
    assert lhs == suspension_time_t(h, s + t).step(p)


def test_denjoy_factor_and_fibers():
    S, fm = denjoy_system(R2, HALF, 20)
    space = S.space
    for p in space.sample(20, seed=3):
        assert fm.project(S.step(p)) == fm.target.step(fm.project(p))
    off_orbit = Circle(sym(Fraction(1, 3)))
    assert len(fm.fiber_probe(off_orbit)) == 1
    for n in (-20, -3, 0, 7, 20):
        assert len(fm.fiber_probe(Circle(sym_frac(R2 * n)))) == 2


def test_denjoy_embedding_is_monotone_and_gaps_shrink():
    S, _ = denjoy_system(R2, HALF, 30)
    space = S.space
    pts = space.sample(200, seed=5)
    enc = np.stack([space.encode(p) for p in pts])
    e = space.embed(enc)
    pos = enc[:, 0]
    order = np.argsort(pos, kind="stable")
    assert np.all(np.diff(e[order]) >= 0)
    ell = space.ell
    mid = len(ell) // 2
    assert np.all(np.diff(ell[mid:]) < 0) and np.all(np.diff(ell[:mid + 1]) > 0)
    assert space.L <= float(space.c)


def test_denjoy_window_degrades_to_plain_point():
    S, _ = denjoy_system(R2, HALF, 5)
    p = S.space.point(sym_frac(R2 * 5), "plus")
    assert p.side == "plus"
    q = S.step(p)
    assert q.side is None and q.pos == sym_frac(R2 * 6)


def test_s3_examples():
    assert s3_translation(Quaternion(1, 0, 0, 0)).step(Quaternion(0, 1, 0, 0)) == Quaternion(0, 1, 0, 0)
    g = circle_subgroup_element(R2 - 1)
    S = s3_translation(g, R2 - 1)
    orbit = S.numeric_orbit(S.space.encode(S.space.base_point())[None], 1000)[0]
    assert np.max(np.abs(orbit[:, 2:])) < 1e-9
    target = np.array([0.0, 0.0, 1.0, 0.0])
    assert np.allclose(np.linalg.norm(orbit - target, axis=1), math.sqrt(2))


def test_two_circles_component_cycle():
    F = two_circles_skew(R2, R3)
    p = Product(Product(Finite(0, 2), Circle(sym(0))), Product(Finite(0, 2), Circle(sym(0))))
    labels = []
    for _ in range(5):
        labels.append((p.left.left.index, p.right.left.index))
        p = F.step(p)
    assert labels == [(0, 0), (1, 0), (0, 1), (1, 1), (0, 0)]
    z, xi = sym_frac(R2 / 3), sym_frac(R3 / 7)
    q = Product(Product(Finite(0, 2), Circle(z)), Product(Finite(0, 2), Circle(xi)))
    q4 = F.iterate(q, 4)
    assert q4.left.right.s == sym_frac(z + 2 * R2) and q4.right.right.s == sym_frac(xi + 2 * R3)


def test_two_circles_equal_rotations_keep_difference():
    F = two_circles_skew(R2, R2)
    for p in F.space.sample(8, seed=2):
        if (p.left.left.index, p.right.left.index) != (0, 0):
            continue
        q = F.iterate(p, 4)
        assert sym_frac(q.right.right.s - q.left.right.s) == sym_frac(p.right.right.s - p.left.right.s)


def test_cyclic_examples():
    assert cyclic_system(1).step(Finite(0, 1)) == Finite(0, 1)
    C = cyclic_system(3)
    assert [p.index for p in C.orbit(Finite(0, 3), 4)] == [0, 1, 2, 0]
    for i in range(3):
        p = Product(Finite(i, 3), Finite(i, 3))
        nxt = Product(C.step(p.left), C.step(p.right))
        assert nxt.left == nxt.right


SPACES = [
    CircleSpace(), TorusSpace(2), TorusSpace(3), CantorSpace(2, 12), CantorSpace(3, 6),
    ProductSpace(CircleSpace(), CantorSpace(2, 8)), KleinSpace(), SphereSpace(),
    suspension_time_t(odometer(2, 8), HALF).space, denjoy_system(R2, HALF, 30)[0].space,
]


@pytest.mark.parametrize("space", SPACES, ids=lambda s: type(s).__name__)
def test_metric_axioms_on_samples(space):
    pts = space.sample(12, seed=7)
    enc = np.stack([space.encode(p) for p in pts])
    d = space.dist(enc[:, None, :], enc[None, :, :])
    assert np.allclose(d, d.T, atol=1e-12)
    assert np.allclose(np.diag(d), 0.0)
    # d[i, k] <= d[i, j] + d[j, k]
    assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-12)


# the sphere net at mesh 0.05 has millions of cells, so it stops at 0.1
NET_CASES = [(sp, e) for sp in SPACES for e in (0.3, 0.1, 0.05) if not (isinstance(sp, SphereSpace) and e < 0.1)]


@pytest.mark.parametrize("space, eps", NET_CASES, ids=lambda v: str(v) if isinstance(v, float) else type(v).__name__)
def test_net_cells_lie_in_eps_balls(space, eps):
    net = space.net(eps)
    assert net.radius <= eps + 1e-12
    pts = space.sample(300, seed=11)
    enc = np.stack([space.encode(p) for p in pts])
    idx = net.locate(enc)
    assert np.all(idx >= 0)
    d = space.dist(enc, net.enc[idx])
    assert np.all(d <= net.radius + 1e-9)
    for p in net.points()[:50]:
        assert space.contains(p)


@pytest.mark.parametrize("make", [
    lambda: circle_rotation(R2), lambda: torus_rotation([R2, R3]), lambda: odometer(2, 10),
    lambda: two_circles_skew(R2, R3), lambda: suspension_time_t(odometer(2, 6), R2 / 4),
    lambda: denjoy_system(R2, HALF, 40)[0], lambda: s3_translation(circle_subgroup_element(R2 - 1)),
])
def test_step_preserves_membership_on_net(make):
    S = make()
    for p in S.space.net(0.2).points()[:64]:
        assert S.space.contains(S.step(p))


def test_numeric_orbit_matches_exact_orbit():
    S = torus_rotation([R2, R3])
    p = S.space.sample(1, seed=0)[0]
    num = S.numeric_orbit(S.space.encode(p)[None], 50)[0]
    exact = np.stack([S.space.encode(q) for q in S.orbit(p, 50)])
    assert np.max(S.space.dist(num, exact)) < 1e-9
