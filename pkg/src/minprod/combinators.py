"""Building systems from systems: products, skew products, the Klein quotient,
factor-map verification and the disc bookkeeping for a Sierpinski curve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .angles import arc_exact, is_exact, is_zero_mod1, mod1
from .dynsys.constructors import _rotation_period
from .dynsys.denjoy import FactorMap
from .dynsys.points import Circle, KleinClass, Product, Torus, is_symbolic_point
from .dynsys.spaces import (
    CircleSpace,
    KleinSpace,
    ProductSpace,
    TorusSpace,
    klein_canonical,
    klein_canonical_array,
)
from .dynsys.system import System, combine_periods
from .report import Report
from .symreal import SymReal, rational_independence, sym, sym_compare, sym_eval, sym_frac

HALF = Fraction(1, 2)

__all__ = [
    "DiscFamily", "DisjointnessViolation", "EquivarianceViolation", "FactorMap", "RotationNotMinimal",
    "direct_product", "identity_factor", "klein_involution", "klein_quotient", "projection_factor",
    "scurve_family", "skew_product", "verify_factor",
]


class EquivarianceViolation(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


class DisjointnessViolation(ValueError):
    def __init__(self, m: int, n: int):
        super().__init__(f"discs {m} and {n} intersect; try a smaller r0")
        self.pair = (m, n)


class RotationNotMinimal(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


# -- direct products ---------------------------------------------------------


def direct_product(A: System, B: System) -> System:
    space = ProductSpace(A.space, B.space)
    da = A.space.dim

    inverse = None
    if A.inverse is not None and B.inverse is not None:
        inverse = lambda p: Product(A.inverse(p.left), B.inverse(p.right))

    orbit_at = orbit_iter = None
    if A.orbit_at is not None and B.orbit_at is not None:
        orbit_at = lambda e, ns: np.concatenate([A.orbit_at(e[:, :da], ns), B.orbit_at(e[:, da:], ns)], axis=-1)
    else:
        def orbit_iter(enc0, stop, chunk):
            ia = A.chunks(enc0[:, :da], 0, stop, chunk)
            ib = B.chunks(enc0[:, da:], 0, stop, chunk)
            for (t0, a), (_, b) in zip(ia, ib):
                yield t0, np.concatenate([a, b], axis=-1)

    def fstep(e):
        e = np.asarray(e)
        return np.concatenate([A.numeric_step(e[..., :da]), B.numeric_step(e[..., da:])], axis=-1)

    period = None
    if A.period is not None or B.period is not None:
        def period(p):
            pa = A.period(p.left) if A.period is not None else None
            pb = B.period(p.right) if B.period is not None else None
            return combine_periods(pa, pb)

    rotation = coords = fcoords = None
    if A.rotation is not None and B.rotation is not None:
        rotation = tuple(A.rotation) + tuple(B.rotation)
        coords = lambda p: tuple(A.coords(p.left)) + tuple(B.coords(p.right))
        fcoords = lambda e: np.concatenate([A.fcoords(e[..., :da]), B.fcoords(e[..., da:])], axis=-1)

    return System(
        space=space,
        step=lambda p: Product(A.step(p.left), B.step(p.right)),
        inverse=inverse,
        power=lambda p, m: Product(A.iterate(p.left, m), B.iterate(p.right, m)),
        name=f"{A.name} x {B.name}",
        params={"left": A, "right": B},
        fstep=fstep,
        orbit_at=orbit_at,
        orbit_iter=orbit_iter,
        period=period,
        rotation=rotation,
        coords=coords,
        fcoords=fcoords,
    )


# -- skew products -----------------------------------------------------------


def _fiber_add(z, v, sign=1):
    if isinstance(z, Circle):
        return Circle(mod1(z.s + v[0] if sign > 0 else z.s - v[0]))
    return Torus(tuple(mod1(a + b if sign > 0 else a - b) for a, b in zip(z.coords, v)))


def skew_product(base: System, f, fiber_dim: int | None = None) -> System:
    """(y, z) -> (S y, z + f(y)) with fiber the circle (n = 1) or the n-torus."""
    n = f.dim if fiber_dim is None else fiber_dim
    if n != f.dim:
        raise ValueError(f"cocycle has dimension {f.dim}, fiber has {n}")
    fiber = CircleSpace() if n == 1 else TorusSpace(n)
    space = ProductSpace(base.space, fiber)
    db = base.space.dim

    def step(p):
        return Product(base.step(p.left), _fiber_add(p.right, f.eval(p.left)))

    inverse = None
    if base.inverse is not None:
        def inverse(p):
            y = base.inverse(p.left)
            return Product(y, _fiber_add(p.right, f.eval(y), -1))

    def power(p, m):
        if m >= 0:
            for _ in range(m):
                p = step(p)
            return p
        for _ in range(-m):
            p = inverse(p)
        return p

    def orbit_iter(enc0, stop, chunk):
        carry = np.asarray(enc0[:, db:], dtype=float).copy()
        for t0, blk in base.chunks(enc0[:, :db], 0, stop, chunk):
            vals = f.eval_array(blk)
            inc = np.cumsum(vals, axis=1)
            fib = (carry[:, None, :] + inc - vals) % 1.0
            carry = (carry + inc[:, -1]) % 1.0
            yield t0, np.concatenate([blk, fib], axis=-1)

    def fstep(e):
        e = np.asarray(e, dtype=float)
        y = e[..., :db]
        return np.concatenate([base.numeric_step(y), (e[..., db:] + f.eval_array(y)) % 1.0], axis=-1)

    rotation = coords = fcoords = period = None
    if base.rotation is not None and f.constant is not None and all(is_exact(c) for c in f.constant):
        rotation = tuple(base.rotation) + tuple(f.constant)
        per = _rotation_period(rotation)
        period = lambda p: per
        fc = (lambda z: (z.s,)) if n == 1 else (lambda z: tuple(z.coords))
        coords = lambda p: tuple(base.coords(p.left)) + fc(p.right)
        fcoords = lambda e: np.concatenate([base.fcoords(e[..., :db]), e[..., db:]], axis=-1)
    elif base.period is not None:
        def period(p):
            q = base.period(p.left)
            return math.inf if q == math.inf else None

    return System(
        space=space,
        step=step,
        inverse=inverse,
        power=power,
        name=f"skew({base.name}, {f.description})",
        params={"base": base, "cocycle": f, "fiber_dim": n},
        fstep=fstep,
        orbit_iter=orbit_iter,
        period=period,
        rotation=rotation,
        coords=coords,
        fcoords=fcoords,
    )


# -- Klein quotient ----------------------------------------------------------


def _pair_accessors(space):
    if isinstance(space, TorusSpace) and space.n == 2:
        return (lambda p: tuple(p.coords)), (lambda g, z: Torus((g, z)))
    if (isinstance(space, ProductSpace) and isinstance(space.left, CircleSpace)
            and isinstance(space.right, CircleSpace)):
        return (lambda p: (p.left.s, p.right.s)), (lambda g, z: Product(Circle(g), Circle(z)))
    raise TypeError("Klein quotient needs a system on the 2-torus or circle x circle")


def klein_involution(g, z) -> tuple:
    return mod1(g + HALF), mod1(-z)


def _klein_samples(count: int = 16) -> list[tuple[SymReal, SymReal]]:
    from .symreal import DEFAULT_REGISTRY

    rng = np.random.default_rng(20240607)
    gens = [DEFAULT_REGISTRY.const(name) for name in ("sqrt2", "sqrt3")]
    out = [(sym(0), sym(0)), (sym(Fraction(1, 4)), sym(Fraction(1, 3)))]
    while len(out) < count:
        pair = []
        for _ in range(2):
            x = sym(Fraction(int(rng.integers(0, 1000)), 1000))
            for gen in gens:
                x = x + gen * Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 5)))
            pair.append(sym_frac(x))
        out.append(tuple(pair))
    return out


def check_equivariance(P: System, count: int = 16, tol: float = 1e-12) -> dict:
    """Compare P(iota p) with iota P(p) on exact sample points.

    Returns {"exact": bool, "max_defect": float, "samples": int}; raises
    EquivarianceViolation with the offending point otherwise.
    """
    get, make = _pair_accessors(P.space)
    exact = True
    worst = 0.0
    samples = _klein_samples(count)
    for g, z in samples:
        p = make(g, z)
        lhs = get(P.step(make(*klein_involution(g, z))))
        rhs = klein_involution(*get(P.step(p)))
        for a, b in zip(lhs, rhs):
            d = a - b
            if is_exact(d):
                if not is_zero_mod1(d):
                    raise EquivarianceViolation(f"P o iota != iota o P at {p}", p)
            else:
                exact = False
                dd = abs(float(d) - round(float(d)))
                worst = max(worst, dd)
                if dd > tol:
                    raise EquivarianceViolation(f"P o iota != iota o P at {p} (defect {dd:.3g})", p)
    return {"exact": exact, "max_defect": worst, "samples": len(samples)}


def klein_quotient(P: System, count: int = 16) -> System:
    get, make = _pair_accessors(P.space)
    check = check_equivariance(P, count)

    def lift(c: KleinClass):
        return make(*c.rep.coords)

    def canon(p) -> KleinClass:
        return KleinClass(Torus(klein_canonical(*get(p))))

    def orbit_iter(enc0, stop, chunk):
        for t0, blk in P.chunks(enc0, 0, stop, chunk):
            yield t0, klein_canonical_array(blk)

    inverse = None
    if P.inverse is not None:
        inverse = lambda c: canon(P.inverse(lift(c)))

    return System(
        space=KleinSpace(),
        step=lambda c: canon(P.step(lift(c))),
        inverse=inverse,
        power=lambda c, m: canon(P.iterate(lift(c), m)),
        name=f"klein({P.name})",
        params={"cover": P, "equivariance": check},
        fstep=lambda e: klein_canonical_array(P.numeric_step(np.asarray(e, dtype=float))),
        orbit_iter=orbit_iter,
    )


# -- factor maps -------------------------------------------------------------


def identity_factor(S: System) -> FactorMap:
    return FactorMap(S, S, lambda p: p, lambda t, resolution=1e-3: [t], name="identity")


def projection_factor(P: System, which: str = "left") -> FactorMap:
    """Coordinate projection of a direct product onto one factor."""
    A, B = P.params["left"], P.params["right"]
    keep, other = (A, B) if which == "left" else (B, A)

    def project(p):
        return p.left if which == "left" else p.right

    def fiber_probe(t, resolution: float = 1e-3):
        pts = other.space.net(resolution).points()
        return [Product(t, q) if which == "left" else Product(q, t) for q in pts]

    return FactorMap(P, keep, project, fiber_probe, name=f"projection-{which}")


def verify_factor(fm: FactorMap, samples: int = 16, horizon: int = 100, seed: int = 0, eps: float = 0.05,
                  resolution: float = 1e-3, singleton_fraction: float = 0.9, tol: float = 1e-9) -> Report:
    """Semiconjugacy defect along sampled orbits plus fiber-size statistics."""
    src, tgt = fm.source, fm.target
    defect = 0.0
    exact = True
    for p in src.space.sample(samples, seed):
        q = fm.project(p)
        for _ in range(horizon):
            p = src.step(p)
            a = fm.project(p)
            b = tgt.step(q)
            exact = exact and is_symbolic_point(a) and is_symbolic_point(b)
            if a != b:
                d = float(tgt.space.metric(a, b))
                # an exact mismatch below float resolution still counts
                defect = max(defect, d, 5e-324 if exact else 0.0)
            q = a

    def fiber_stats(targets):
        sizes = []
        stray = 0.0
        for t in targets:
            fib = fm.fiber_probe(t, resolution)
            sizes.append(len(fib))
            for s in fib[:64]:
                stray = max(stray, float(tgt.space.metric(fm.project(s), t)))
        return sizes, stray

    net_targets = tgt.space.net(eps).points()
    sizes, stray = fiber_stats(net_targets)
    sing_sizes, stray2 = fiber_stats(fm.singular_targets)
    frac_single = sum(1 for s in sizes if s == 1) / max(1, len(sizes))
    almost = frac_single >= singleton_fraction

    def hist(xs):
        out: dict[int, int] = {}
        for x in xs:
            out[x] = out.get(x, 0) + 1
        return {k: out[k] for k in sorted(out)}

    if defect > tol:
        verdict = "fail"
    elif almost:
        verdict = "pass"
    else:
        verdict = "inconclusive"
    return Report(
        op="verify_factor",
        verdict=verdict,
        params={"factor": fm.name, "samples": samples, "horizon": horizon, "seed": seed, "eps": eps,
                "resolution": resolution, "singleton_fraction": singleton_fraction},
        evidence={
            "semiconjugacy_defect": defect,
            "defect_exact": exact,
            "net_probes": len(sizes),
            "net_fiber_sizes": hist(sizes),
            "singleton_fraction": frac_single,
            "singular_probes": len(sing_sizes),
            "singular_fiber_sizes": hist(sing_sizes),
            "max_projection_error": max(stray, stray2),
            "almost_one_to_one": almost,
            "closedness": "assumed (compact source)",
        },
    )


# -- Sierpinski-curve disc bookkeeping ---------------------------------------


def _sq_bounds(x: SymReal, eps: Fraction) -> tuple[Fraction, Fraction]:
    lo, hi = sym_eval(x, eps)
    lo = max(lo, Fraction(0))
    return lo * lo, hi * hi


@dataclass
class DiscFamily:
    """Closed round discs centred on a rotation orbit, radii r0 * 2**-|n|."""

    alpha2: tuple
    r0: Fraction
    window: int
    indices: list
    centers: list
    radii: list
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        self._c = np.array([[float(c) for c in t.coords] for t in self.centers])
        self._r = np.array([float(r) for r in self.radii])

    def _dist_matrix(self, pts: np.ndarray) -> np.ndarray:
        d = np.abs(pts[:, None, :] - self._c[None, :, :]) % 1.0
        d = np.minimum(d, 1.0 - d)
        return np.sqrt((d * d).sum(-1))

    def membership_array(self, pts: np.ndarray) -> np.ndarray:
        """True where a point lies in no open disc (float test)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return (self._dist_matrix(pts) >= self._r).all(axis=1)

    def membership(self, p: Torus) -> bool:
        """Exact for symbolic points: p is a member iff |p - x_n| >= r_n for all n."""
        coords = p.coords
        if not all(isinstance(c, SymReal) for c in coords):
            return bool(self.membership_array(np.array([[float(c) for c in coords]]))[0])
        pf = np.array([[float(c) for c in coords]])
        dist = self._dist_matrix(pf)[0]
        for i in np.flatnonzero(dist < self._r + 1e-9):
            if self._inside_exact(coords, i):
                return False
        return True

    def _inside_exact(self, coords, i) -> bool:
        r2 = self.radii[i] ** 2
        dx = [arc_exact(a - b) for a, b in zip(coords, self.centers[i].coords)]
        eps = Fraction(1, 10**6)
        while eps > Fraction(1, 10**30):
            lows, highs = zip(*(_sq_bounds(d, eps) for d in dx))
            if sum(highs) < r2:
                return True
            if sum(lows) >= r2:
                return False
            eps /= 10**4
        return False

    def distance_to_discs(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.maximum(self._dist_matrix(pts) - self._r, 0.0).min(axis=1)

    def collapse(self, p: Torus) -> Torus:
        """Factor map to the torus: boundary circles go to their centres."""
        pf = np.array([[float(c) for c in p.coords]])
        gap = self._dist_matrix(pf)[0] - self._r
        i = int(np.argmin(np.abs(gap)))
        return self.centers[i] if abs(gap[i]) <= 1e-12 else p

    def density_evidence(self, mesh: float) -> dict:
        """Largest distance from a member grid point to the union of discs."""
        k = math.ceil(1.0 / mesh)
        g = (np.stack(np.meshgrid(np.arange(k), np.arange(k), indexing="ij"), -1).reshape(-1, 2) + 0.5) / k
        member = self.membership_array(g)
        dist = self.distance_to_discs(g[member])
        sup = float(dist.max()) if len(dist) else 0.0
        return {"mesh": 1.0 / k, "grid_points": int(len(g)), "members": int(member.sum()),
                "sup_distance": sup, "dense_at_mesh": sup <= 1.0 / k}


def _disjoint(dx: list, s2: Fraction) -> bool:
    """Decide dx[0]**2 + dx[1]**2 > s2 from refined enclosures."""
    eps = Fraction(1, 10**6)
    while True:
        lows, highs = zip(*(_sq_bounds(d, eps) for d in dx))
        if sum(lows) > s2:
            return True
        if sum(highs) <= s2:
            return False
        eps /= 10**4


def scurve_family(alpha2: Sequence, r0, window: int = 100) -> DiscFamily:
    """Discs of radius r0 * 2**-|n| at n * alpha2 mod 1, |n| <= window, checked disjoint."""
    alpha2 = tuple(a if isinstance(a, SymReal) else sym(a) for a in alpha2)
    if len(alpha2) != 2:
        raise ValueError("need a rotation of the 2-torus")
    verdict = rational_independence(list(alpha2))
    if not verdict.independent:
        raise RotationNotMinimal("torus rotation is not minimal", verdict.witness)
    r0 = Fraction(r0)
    idx = list(range(-window, window + 1))
    centers = [Torus(tuple(sym_frac(a * n) for a in alpha2)) for n in idx]
    radii = [r0 / 2 ** abs(n) for n in idx]
    # the distance between x_m and x_n depends only on k = m - n, and the
    # largest radius sum at difference k is r0 * (1 + 2**-k)
    margin = None
    for k in range(1, 2 * window + 1):
        dx = [arc_exact(a * k) for a in alpha2]
        if not _disjoint(dx, (r0 * (1 + Fraction(1, 2**k))) ** 2):
            for m in idx:
                n = m - k
                if abs(n) <= window and not _disjoint(dx, (radii[m + window] + radii[n + window]) ** 2):
                    raise DisjointnessViolation(m, n)
        gap = math.hypot(*(float(d) for d in dx)) - float(r0 * (1 + Fraction(1, 2**k)))
        margin = gap if margin is None else min(margin, gap)
    ratios = {radii[i + 1] / radii[i] for i in range(len(radii) - 1)}
    return DiscFamily(alpha2, r0, window, idx, centers, radii,
                      evidence={"pairs_checked": len(idx) * (len(idx) - 1) // 2, "min_margin": margin,
                                "radius_ratios": sorted(ratios), "disjoint": True})
