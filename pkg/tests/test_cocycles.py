from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _cases import random_base, random_cocycle, random_tents
from minprod.angles import arc, is_exact, mod1
from minprod.cocycles import (
    BudgetExhausted, anzai_cocycle, build_transitive_cocycle, built_from_json, built_to_json, coboundary,
    const_cocycle, invariant_check, iterate_cocycle, iterate_cocycle_array, perturb_cocycle, sine_cocycle,
    telescoped, tent_cocycle, verify_build, zero_cocycle,
)
from minprod.dynsys import Ball, Circle, circle_rotation
from minprod.symreal import const, sym, sym_frac

R2 = const("sqrt2")
HALF = Fraction(1, 2)


def _gap(a, b) -> float:
    return arc(float(a), float(b))


def test_iterate_base_case_and_constant():
    S = circle_rotation(R2)
    y = Circle(sym(Fraction(1, 3)))
    f = anzai_cocycle()
    assert iterate_cocycle(f, S, y, 1) == f.eval(y)
    c = const_cocycle(R2 / 3)
    assert iterate_cocycle(c, S, y, 11) == (sym_frac(11 * R2 / 3),)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 50), st.integers(1, 50))
def test_cocycle_identity(seed, k, n):
    rng = np.random.default_rng(seed)
    f, exact = random_cocycle(rng)
    S = random_base(rng)
    y = S.space.sample(1, seed)[0]
    lhs = iterate_cocycle(f, S, y, k + n)
    rhs = [mod1(a + b) for a, b in zip(iterate_cocycle(f, S, S.iterate(y, k), n), iterate_cocycle(f, S, y, k))]
    for a, b in zip(lhs, rhs):
        if exact:
            assert is_exact(a) and a == b
        else:
            assert _gap(a, b) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_exact_and_array_iterates_agree(seed, n):
    rng = np.random.default_rng(seed)
    f, _ = random_cocycle(rng)
    S = random_base(rng)
    y = S.space.sample(1, seed)[0]
    exact = iterate_cocycle(f, S, y, n)[0]
    num = iterate_cocycle_array(f, S, S.space.encode(y)[None], n)[0, 0]
    assert _gap(exact, num) < 1e-9


def test_coboundary_examples():
    S = circle_rotation(R2)
    const_xi = const_cocycle(R2 / 5)
    for p in S.space.sample(5, seed=0):
        assert coboundary(const_xi, S).eval(p) == (sym(0),)
    identity_xi = anzai_cocycle()
    cob = coboundary(identity_xi, S)
    for p in S.space.sample(5, seed=1):
        assert cob.eval(p) == (sym_frac(R2),)


@pytest.mark.parametrize("seed", range(6))
def test_coboundary_telescopes_exactly(seed):
    rng = np.random.default_rng(seed)
    xi = tent_cocycle(random_tents(rng, 4))
    S = random_base(rng)
    cob = coboundary(xi, S)
    y = S.space.sample(1, seed)[0]
    tele = telescoped(cob, S, y, 7)
    assert tele == iterate_cocycle(cob, S, y, 7)
    assert tele == tuple(mod1(a - b) for a, b in zip(xi.fn(S.iterate(y, 7)), xi.fn(y)))


@pytest.mark.parametrize("f, defect", [
    (sine_cocycle(Fraction(3, 10)), 0.0),
    (const_cocycle(Fraction(1, 4)), 0.5),
    (const_cocycle(HALF), 0.0),
])
def test_invariant_check_examples(f, defect):
    rep = invariant_check(f)
    assert abs(rep.evidence["defect"] - defect) <= 1e-12
    assert rep.verdict == ("pass" if defect == 0 else "fail")


def _window_setup():
    S = circle_rotation(R2)
    y0 = Circle(sym(0))
    U = Ball(Circle(sym(Fraction(3, 16))), 0.1)
    k = next(t for t in range(1, 200) if S.space.metric(S.iterate(y0, t), U.center) < 0.1)
    return S, y0, U, k


def test_perturbation_zero_target_is_trivial():
    S, y0, U, k = _window_setup()
    V = Ball((sym(0),), 0.05)
    pert, n = perturb_cocycle(None, 0.1, S, y0, (U, V), k)
    assert pert.report.get("trivial") and len(pert.tents) == 0


@pytest.mark.parametrize("symmetric", [False, True])
def test_perturbation_guarantees_and_literal_route(symmetric):
    S, y0, U, k = _window_setup()
    V = Ball((sym(Fraction(5, 8)),), 0.05)
    pert, n = perturb_cocycle(None, 0.1, S, y0, (U, V), k, symmetric=symmetric)
    rep = pert.report
    assert rep["ok"] and rep["zeros_exact"] and rep["peak_exact"]
    assert rep["sup_cob"] < 0.1 and rep["sup_cob_fine"] < 0.2
    theta = pert.transfer
    assert theta.fn(S.iterate(y0, k)) == (sym(0),)
    assert mod1(theta.fn(S.iterate(y0, k + n))[0]) == mod1(sym(pert.g_tilde[0]))
    # the merged tent table and the defining average of bumps are two routes to the same function
    for p in S.space.sample(6, seed=3) + [S.iterate(y0, k + n + 1)]:
        assert theta.fn(p) == pert.literal(p)
    grid = (np.arange(257) / 257)[:, None]
    assert np.max(np.abs(theta.fn_array(grid) - pert.literal_array(grid))) < 1e-12
    if symmetric:
        g = (np.arange(64) / 64)[:, None]
        assert np.max(np.abs(theta.fn_array(g) + theta.fn_array((g + 0.5) % 1.0))) < 1e-12


def test_builder_trivial_pair_needs_nothing():
    S = circle_rotation(R2)
    res = build_transitive_cocycle(S, [(Ball(Circle(sym(0)), 1.0), Ball((sym(0),), 1.0))])
    assert res.complete and not res.perturbations


def _pairs(count: int = 8):
    return [(Ball(Circle(sym(Fraction(2 * i + 1, 16))), 0.1), Ball((sym(Fraction(3 * i % 8, 8) + Fraction(1, 16)),), 0.1))
            for i in range(count)]


def test_builder_covers_pairs_and_round_trips():
    S = circle_rotation(R2)
    pairs = _pairs()
    res = build_transitive_cocycle(S, pairs, budget=64)
    assert res.complete
    assert verify_build(res, pairs).verdict == "pass"
    doc = built_to_json(res)
    again = built_from_json(doc, S)
    table = built_from_json(doc)
    g = (np.arange(1024) / 1024)[:, None]
    assert np.max(np.abs(again.eval_array(g) - res.cocycle.eval_array(g))) < 1e-12
    d = (table.eval_array(g + 0.5 / 1024) - res.cocycle.eval_array(g + 0.5 / 1024)) % 1.0
    assert np.max(np.minimum(d, 1 - d)) < 0.05


def test_builder_budget_exhaustion_lists_pairs():
    S = circle_rotation(R2)
    with pytest.raises(BudgetExhausted) as err:
        build_transitive_cocycle(S, _pairs(), budget=0)
    assert err.value.uncovered and not err.value.result.complete
