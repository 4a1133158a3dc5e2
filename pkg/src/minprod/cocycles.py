"""Torus-valued cocycles over a base system.

A cocycle ``f`` drives the fiber of ``(y, z) -> (S y, z + f(y))``.  Exact
points (SymReal coordinates) give exact values (SymReal or TrigSum); floats
give floats.  Perturbations are sums of piecewise-linear tents around orbit
segments, so their exact values at symbolic orbit points are exact too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .angles import TrigSum, arc, arc_exact, is_exact, mod1
from .dynsys import Ball, Circle, CircleSpace, System, Torus, TorusSpace
from .report import Report, jsonable
from .symreal import SymReal, parse_sym, sym, sym_compare, sym_frac

HALF = Fraction(1, 2)
DYADIC_BITS = 32


class ConstructionFailure(RuntimeError):
    """No admissible return time, or bump supports collide."""


class BudgetExhausted(RuntimeError):
    def __init__(self, result: BuildResult):
        super().__init__(f"budget exhausted with {len(result.uncovered)} uncovered pairs")
        self.result = result
        self.uncovered = result.uncovered


def _reduce(v):
    if isinstance(v, (SymReal, TrigSum, int, Fraction)):
        return mod1(v)
    return float(v) % 1.0


def _angle(p):
    """Circle coordinate a catalog cocycle reads from a base point."""
    if isinstance(p, Circle):
        return p.s
    if isinstance(p, Torus):
        return p.coords[0]
    raise TypeError(f"catalog cocycles read a circle or torus point, got {type(p).__name__}")


def _coords(p) -> tuple:
    if isinstance(p, Circle):
        return (p.s,)
    if isinstance(p, Torus):
        return tuple(p.coords)
    raise TypeError(f"tent sums live on a circle or torus, got {type(p).__name__}")


def _point_like(p, coords):
    return Circle(coords[0]) if isinstance(p, Circle) else Torus(tuple(coords))


class Cocycle:
    """A map from base points to the n-torus, values reduced mod 1."""

    def __init__(self, fn: Callable, fn_array: Callable, dim: int = 1, description: str = "",
                 lipschitz: float | None = None, constant: tuple | None = None, spec: dict | None = None):
        self.fn = fn
        self.fn_array = fn_array
        self.dim = dim
        self.description = description
        self.lipschitz = lipschitz
        self.constant = constant
        self.spec = spec

    def __repr__(self) -> str:
        return f"Cocycle({self.description})"

    def raw(self, p) -> tuple:
        return tuple(self.fn(p))

    def eval(self, p) -> tuple:
        return tuple(_reduce(v) for v in self.fn(p))

    __call__ = eval

    def eval_array(self, enc) -> np.ndarray:
        """Values for encoded points ``(..., d)`` as ``(..., dim)`` in [0, 1)."""
        return np.asarray(self.fn_array(np.asarray(enc, dtype=float)), dtype=float) % 1.0

    def __add__(self, other: Cocycle) -> Cocycle:
        if other.dim != self.dim:
            raise ValueError("cocycle dimensions differ")
        const = None
        if self.constant is not None and other.constant is not None:
            const = tuple(_reduce(a + b) for a, b in zip(self.constant, other.constant))
        lip = None if self.lipschitz is None or other.lipschitz is None else self.lipschitz + other.lipschitz
        return Cocycle(lambda p: tuple(a + b for a, b in zip(self.fn(p), other.fn(p))),
                       lambda e: self.fn_array(e) + other.fn_array(e),
                       self.dim, f"{self.description} + {other.description}", lip, const,
                       {"kind": "sum", "parts": [self.spec, other.spec]}
                       if self.spec is not None and other.spec is not None else None)

    def to_json(self) -> dict:
        return {"description": self.description, "dim": self.dim, "spec": jsonable(self.spec)}


# -- catalog ---------------------------------------------------------------


def zero_cocycle(dim: int = 1) -> Cocycle:
    zero = tuple(sym(0) for _ in range(dim))
    return Cocycle(lambda p: zero, lambda e: np.zeros(np.shape(e)[:-1] + (dim,)), dim, "zero",
                   0.0, zero, {"kind": "zero", "dim": dim})


def const_cocycle(c) -> Cocycle:
    """Constant cocycle; ``c`` is a value or a tuple of values."""
    vals = tuple(c) if isinstance(c, (tuple, list)) else (c,)
    vals = tuple(v if isinstance(v, (SymReal, float)) else sym(v) for v in vals)
    vals = tuple(_reduce(v) for v in vals)
    fv = np.array([float(v) for v in vals])
    return Cocycle(lambda p: vals, lambda e: np.broadcast_to(fv, np.shape(e)[:-1] + (len(vals),)).copy(),
                   len(vals), f"const({', '.join(str(v) for v in vals)})", 0.0, vals,
                   {"kind": "const", "value": [str(v) for v in vals]})


def linear_cocycle(m: int) -> Cocycle:
    """``gamma -> m * gamma``; continuous on the circle only for integer m."""
    if int(m) != m:
        raise ValueError("linear cocycle needs an integer slope to be continuous")
    m = int(m)
    return Cocycle(lambda p: (_angle(p) * m,), lambda e: e[..., :1] * m, 1, f"linear({m})",
                   float(abs(m)), sym(0) if m == 0 else None, {"kind": "linear", "m": m})


def anzai_cocycle() -> Cocycle:
    f = linear_cocycle(1)
    f.description, f.spec = "anzai", {"kind": "anzai"}
    return f


def sine_cocycle(kappa, offset=HALF) -> Cocycle:
    """``gamma -> offset + kappa * sin(2 pi gamma)``; exact TrigSum on symbolic input."""
    k = Fraction(kappa) if not isinstance(kappa, float) else Fraction(str(kappa))
    off = Fraction(offset)
    kf, of = float(k), float(off)

    def fn(p):
        g = _angle(p)
        if is_exact(g):
            return (TrigSum.sine(g, k, off),)
        return (of + kf * math.sin(2 * math.pi * float(g)),)

    return Cocycle(fn, lambda e: of + kf * np.sin(2 * np.pi * e[..., :1]), 1,
                   f"sine(kappa={k}, offset={off})", 2 * math.pi * abs(kf), None,
                   {"kind": "sine", "kappa": str(k), "offset": str(off)})


# -- tents -----------------------------------------------------------------


class TentSum:
    """``y -> sum_k w_k * max(0, 1 - d(y, c_k) / r_k)`` on the circle or a torus."""

    def __init__(self, centers: Sequence[tuple], weights: Sequence[tuple], radii: Sequence, dim: int):
        self.centers = [tuple(c) for c in centers]
        self.weights = [tuple(Fraction(w) for w in ws) for ws in weights]
        self.radii = [Fraction(r) for r in radii]
        self.dim = dim
        self.base_dim = len(self.centers[0]) if self.centers else 1
        self.C = np.array([[float(v) for v in c] for c in self.centers]).reshape(-1, self.base_dim)
        self.W = np.array([[float(v) for v in w] for w in self.weights]).reshape(-1, dim)
        self.R = np.array([float(r) for r in self.radii])

    def __len__(self) -> int:
        return len(self.centers)

    @staticmethod
    def concat(parts: Sequence[TentSum], dim: int) -> TentSum:
        cs, ws, rs = [], [], []
        for t in parts:
            cs += t.centers
            ws += t.weights
            rs += t.radii
        return TentSum(cs, ws, rs, dim)

    def value(self, coords: tuple) -> tuple:
        zero = [Fraction(0)] * self.dim
        if not self.centers:
            return tuple(sym(0) for _ in zero)
        exact = all(isinstance(c, SymReal) for c in coords)
        x = np.array([float(c) for c in coords])
        d = np.max(np.abs((x[None, :] - self.C + 0.5) % 1.0 - 0.5), axis=1)
        hits = np.flatnonzero(d < self.R + 1e-9)
        if not exact:
            out = np.zeros(self.dim)
            for i in hits:
                t = max(0.0, 1.0 - d[i] / self.R[i])
                out += self.W[i] * t
            return tuple(float(v) for v in out)
        acc: list[Any] = [sym(0) for _ in zero]
        for i in hits:
            de = _exact_max([arc_exact(a - b) for a, b in zip(coords, self.centers[i])])
            if sym_compare(de, self.radii[i]) >= 0:
                continue
            t = 1 - de / self.radii[i]
            acc = [a + t * w for a, w in zip(acc, self.weights[i])]
        return tuple(acc)

    def array(self, enc, chunk: int = 2048) -> np.ndarray:
        enc = np.asarray(enc, dtype=float)
        lead = enc.shape[:-1]
        flat = enc.reshape(-1, enc.shape[-1])[:, : self.base_dim]
        out = np.zeros((flat.shape[0], self.dim))
        if not self.centers:
            return out.reshape(lead + (self.dim,))
        for s in range(0, flat.shape[0], chunk):
            blk = flat[s:s + chunk]
            d = np.max(np.abs((blk[:, None, :] - self.C[None] + 0.5) % 1.0 - 0.5), axis=2)
            t = np.clip(1.0 - d / self.R[None, :], 0.0, None)
            out[s:s + chunk] = t @ self.W
        return out.reshape(lead + (self.dim,))

    def to_json(self) -> dict:
        return {"centers": [[str(v) for v in c] for c in self.centers],
                "weights": [[str(v) for v in w] for w in self.weights],
                "radii": [str(r) for r in self.radii], "dim": self.dim}

    @classmethod
    def from_json(cls, d: dict) -> TentSum:
        return cls([tuple(parse_sym(v) for v in c) for c in d["centers"]],
                   [tuple(Fraction(v) for v in w) for w in d["weights"]],
                   [Fraction(r) for r in d["radii"]], d["dim"])


def _exact_max(vals: list[SymReal]) -> SymReal:
    best = vals[0]
    for v in vals[1:]:
        if sym_compare(v, best) > 0:
            best = v
    return best


def tent_cocycle(tents: TentSum, description: str = "tents", template=None) -> Cocycle:
    """Wrap a tent sum as a transfer function on circle/torus points."""
    lip = float(np.max(np.abs(tents.W).sum(axis=1) / tents.R)) if len(tents) else 0.0
    f = Cocycle(lambda p: tents.value(_coords(p)), tents.array, tents.dim, description, lip, None,
                {"kind": "tents", "tents": tents.to_json()})
    f.tents = tents
    return f


def transfer_sum(parts: Sequence[Cocycle], dim: int) -> Cocycle:
    """Sum of tent transfers, evaluated as one merged tent table."""
    tents = TentSum.concat([p.tents for p in parts], dim)
    f = tent_cocycle(tents, f"transfer({len(parts)} perturbations)")
    f.parts = list(parts)
    return f


# -- iteration and coboundaries ---------------------------------------------


def iterate_cocycle(f: Cocycle, S: System, y, n: int) -> tuple:
    """``f^(n)(y) = f(y) + f(S y) + ... + f(S^(n-1) y)`` mod 1."""
    if n < 1:
        raise ValueError("n must be positive")
    acc = list(f.eval(y))
    p = y
    for _ in range(n - 1):
        p = S.step(p)
        acc = [_reduce(a + b) for a, b in zip(acc, f.eval(p))]
    return tuple(acc)


def iterate_cocycle_array(f: Cocycle, S: System, enc0, n: int) -> np.ndarray:
    """Numeric ``f^(n)`` for encoded starting points ``(B, d)``; returns ``(B, dim)``."""
    enc0 = np.atleast_2d(np.asarray(enc0, dtype=float))
    acc = np.zeros((enc0.shape[0], f.dim))
    for _, blk in S.chunks(enc0, 0, n):
        acc = (acc + f.eval_array(blk).sum(axis=1)) % 1.0
    return acc


def coboundary(xi: Cocycle, S: System) -> Cocycle:
    """``y -> xi(S y) - xi(y)`` mod 1."""
    const = tuple(sym(0) for _ in range(xi.dim)) if xi.constant is not None else None
    lip = None if xi.lipschitz is None else 2 * xi.lipschitz
    f = Cocycle(lambda p: tuple(a - b for a, b in zip(xi.fn(S.step(p)), xi.fn(p))),
                lambda e: xi.fn_array(S.numeric_step(e)) - xi.fn_array(e),
                xi.dim, f"cob({xi.description})", lip, const,
                {"kind": "coboundary", "transfer": xi.spec} if xi.spec is not None else None)
    f.transfer = xi
    f.base = S
    return f


def telescoped(f: Cocycle, S: System, y, n: int) -> tuple:
    """``f^(n)(y)`` for ``f = base + cob(xi)`` using ``xi(S^n y) - xi(y)`` for the coboundary part."""
    xi = getattr(f, "transfer", None)
    if xi is None:
        return iterate_cocycle(f, S, y, n)
    end = S.iterate(y, n)
    return tuple(_reduce(a - b) for a, b in zip(xi.fn(end), xi.fn(y)))


# -- Klein invariance --------------------------------------------------------


def invariant_check(f: Cocycle, grid: int = 4096, exact_grid: int = 64, tol: float = 1e-12) -> Report:
    """Defect of ``f(gamma + 1/2) + f(gamma) = 0`` mod 1 on the circle."""
    if f.dim != 1:
        raise ValueError("invariance check needs fiber dimension 1")
    g = (np.arange(grid) / grid)[:, None]
    v = (f.eval_array(g)[:, 0] + f.eval_array((g + 0.5) % 1.0)[:, 0]) % 1.0
    numeric = float(np.max(np.minimum(v, 1.0 - v)))
    exact: float | None = 0.0
    for j in range(exact_grid):
        gam = sym(Fraction(j, exact_grid) + Fraction(1, 7 * exact_grid))
        s = f.raw(Circle(gam))[0] + f.raw(Circle(sym_frac(gam + HALF)))[0]
        if not is_exact(s):
            exact = None
            break
        s = mod1(s)
        if isinstance(s, TrigSum) and not s.terms:
            s = s.const
        exact = max(exact, float(arc_exact(s)) if isinstance(s, SymReal) else arc(float(s), 0.0))
    if exact is None:
        ok = numeric <= tol
    else:
        ok = exact == 0.0 and numeric <= tol
    return Report("invariant_check", "pass" if ok else "fail",
                  {"cocycle": f.description, "grid": grid, "tol": tol},
                  {"defect": max(numeric, exact or 0.0), "numeric_defect": numeric,
                   "exact_points": exact_grid if exact is not None else 0, "exact_defect": exact})


# -- the perturbation ----------------------------------------------------------


def _dyadic(x: float) -> Fraction:
    return Fraction(round(x * 2**DYADIC_BITS), 2**DYADIC_BITS)


def _lift(g: Fraction, winding: int) -> Fraction:
    """Representative of ``g mod 1`` in ``[winding, winding + 1)``."""
    g = g - math.floor(g)
    return g + winding


def _metric_exact(a: tuple, b: tuple):
    return _exact_max([arc_exact(x - y) for x, y in zip(a, b)])


def _fdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.max(np.abs((a - b + 0.5) % 1.0 - 0.5), axis=-1)


def _group_dist(v: Sequence[float], c: Sequence[float]) -> float:
    return max(arc(float(a), float(b)) for a, b in zip(v, c))


def _group_dist_exact(v: Sequence, c: Sequence):
    """Exact max arc distance when every value is symbolic, else None."""
    out = []
    for a, b in zip(v, c):
        a = a.const if isinstance(a, TrigSum) and not a.terms else a
        if not isinstance(a, SymReal) or isinstance(b, float):
            return None
        out.append(arc_exact(a - b))
    return _exact_max(out)


@dataclass(eq=False)
class Perturbation:
    """Transfer bump ``theta = g~ * rho`` (or its antisymmetrised form) with construction data."""

    transfer: Cocycle
    k: int
    n: int
    N: int
    radius: Fraction
    g: tuple
    g_tilde: tuple
    symmetric: bool
    anchors_one: list
    report: dict = field(default_factory=dict)
    base: System | None = None

    @property
    def tents(self) -> TentSum:
        return self.transfer.tents

    def literal(self, p) -> tuple:
        """``g~ * (1/N) sum_{i<N} kappa(S^i p)`` evaluated from its definition."""
        S = self.base
        rho = _literal_rho(S, self.anchors_one, self.radius, p, self.N)
        if self.symmetric:
            rho = rho - _literal_rho(S, self.anchors_one, self.radius, _antipode(p), self.N)
        return tuple(rho * g for g in self.g_tilde)

    def literal_array(self, enc) -> np.ndarray:
        S = self.base
        enc = np.atleast_2d(np.asarray(enc, dtype=float))
        A = np.array([S.space.encode(a) for a in self.anchors_one])
        r = float(self.radius)

        def rho(e):
            orb = S.numeric_orbit(e, self.N)
            d = _fdist(orb[:, :, None, :], A[None, None])
            return np.clip(1.0 - d / r, 0.0, None).sum(axis=(1, 2)) / self.N

        val = rho(enc)
        if self.symmetric:
            val = val - rho((enc + 0.5) % 1.0)
        return val[:, None] * np.array([float(g) for g in self.g_tilde])[None]


def _antipode(p):
    return Circle(sym_frac(p.s + HALF)) if isinstance(p.s, SymReal) else Circle((p.s + 0.5) % 1.0)


def _literal_rho(S: System, anchors: list, r: Fraction, p, N: int):
    total = sym(0)
    q = p
    for _ in range(N):
        c = _coords(q)
        for a in anchors:
            d = _metric_exact(c, _coords(a))
            if sym_compare(d, r) < 0:
                total = total + (1 - d / r)
        q = S.step(q)
    return total / N


def _current_value(base_cocycle: Cocycle | None, xi_fn: Callable, S: System, start, end, n: int) -> tuple:
    """``f^(n)(start)`` for ``f = base_cocycle + cob(xi)``, exact when possible."""
    tele = [a - b for a, b in zip(xi_fn(end), xi_fn(start))]
    if base_cocycle is None:
        return tuple(_reduce(v) for v in tele)
    if base_cocycle.constant is not None:
        return tuple(_reduce(c * n + v) for c, v in zip(base_cocycle.constant, tele))
    s = iterate_cocycle_array(base_cocycle, S, S.space.encode(start)[None], n)[0]
    return tuple((float(a) + float(b)) % 1.0 for a, b in zip(s, tele))


def _need_rotation(base: System):
    if base.rotation is None or not isinstance(base.space, (CircleSpace, TorusSpace)):
        raise TypeError("perturbations are built over circle or torus rotations")


def perturb_cocycle(xi: Cocycle | None, eps: float, base: System, y0, W: tuple[Ball, Ball], k: int, *,
                    horizon: int = 100_000, protect: Sequence = (), symmetric: bool = False,
                    winding: int = 0, base_cocycle: Cocycle | None = None, grid: int = 4096,
                    dim: int | None = None) -> tuple[Perturbation, int]:
    """Perturb the transfer ``xi`` so the cocycle lands in the group window.

    With ``f = base_cocycle + cob(xi)`` and ``theta`` returned, the cocycle
    ``base_cocycle + cob(xi + theta)`` satisfies: ``S^(k+n) y0`` lies in the
    base window, its ``n``-step value at ``S^k y0`` lies in the group window,
    ``theta`` vanishes at ``S^k y0`` and at every protected point, and
    ``|cob(theta)| < eps`` in sup norm.
    """
    _need_rotation(base)
    U, V = W
    dim = dim or len(V.center)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if symmetric and not isinstance(base.space, CircleSpace):
        raise ValueError("symmetrised perturbations need a circle base")
    xi_fn = xi.fn if xi is not None else (lambda p: tuple(sym(0) for _ in range(dim)))
    xi_arr = xi.fn_array if xi is not None else (lambda e: np.zeros(np.shape(e)[:-1] + (dim,)))
    space = base.space
    yk = base.iterate(y0, k)
    if not space.contains(yk) or space.metric(yk, U.center) > U.radius:
        raise ValueError(f"orbit of y0 is not in the base window at time {k}")
    bound = abs(winding) + 1
    N = math.floor((2 if symmetric else 1) * bound / eps) + 1

    e0 = space.encode(y0)[None]
    orb = base.numeric_orbit(e0, k + horizon + N + 1)[0]
    uc = space.encode(U.center)
    inside = np.flatnonzero(_fdist(orb, uc[None]) < U.radius - 1e-9)
    candidates = inside[inside >= k + N]
    if len(candidates) == 0:
        raise ConstructionFailure(f"no return to the base window in [k + {N}, k + {horizon}]")

    zero_pts = [yk] + list(protect)
    fz = np.array([space.encode(z) for z in zero_pts])
    tried = 0
    for T in candidates:
        T = int(T)
        n = T - k
        ms = np.arange(-N + 1, N)
        C = orb[T + ms]
        Z = np.concatenate([fz, orb[k:k + N]])
        if symmetric:
            Z = np.concatenate([Z, (Z + 0.5) % 1.0, (orb[T:T + 1] + 0.5) % 1.0])
        dc = _fdist(C[:, None], C[None])
        np.fill_diagonal(dc, np.inf)
        dz = _fdist(Z[:, None], C[None])
        dmin = min(float(dc.min()), float(dz.min()))
        tried += 1
        if dmin > 1e-9:
            break
    else:
        raise ConstructionFailure(f"bump supports collide at all {tried} candidate return times")

    r = Fraction(math.floor(dmin / 3 * 2**40), 2**40)
    yT = base.iterate(y0, T)
    current = _current_value(base_cocycle, xi_fn, base, yk, yT, n)
    g = tuple(_dyadic((float(c) - float(v)) % 1.0) for c, v in zip(V.center, current))
    if all(gi == 0 or gi == 1 for gi in g):
        theta = tent_cocycle(TentSum([], [], [], dim), "zero")
        pert = Perturbation(theta, k, n, N, r, (Fraction(0),) * dim, (Fraction(0),) * dim, symmetric, [], base=base)
        pert.report = {"trivial": True, "return_time": T}
        return pert, n
    gt = tuple(_lift(gi, winding) for gi in g)
    centers = [base.iterate(y0, T + int(m)) for m in ms]
    weights = [tuple(gv * Fraction(N - abs(int(m)), N) for gv in gt) for m in ms]
    cs = [_coords(c) for c in centers]
    radii = [r] * len(cs)
    if symmetric:
        cs = cs + [(sym_frac(c[0] + HALF),) for c in cs]
        weights = weights + [tuple(-w for w in ws) for ws in weights]
        radii = radii * 2
    theta = tent_cocycle(TentSum(cs, weights, radii, dim), f"bump(k={k}, n={n}, N={N})")
    pert = Perturbation(theta, k, n, N, r, g, gt, symmetric, centers[N - 1:], base=base)
    pert.report = _verify_perturbation(pert, xi_fn, xi_arr, base, base_cocycle, y0, yk, yT, U, V, eps, grid, protect)
    if not pert.report["ok"]:
        raise ConstructionFailure(f"post-hoc verification failed: {pert.report}")
    return pert, n


def _verify_perturbation(pert: Perturbation, xi_fn, xi_arr, base: System, base_cocycle, y0, yk, yT,
                         U: Ball, V: Ball, eps: float, grid: int, protect) -> dict:
    space = base.space
    theta = pert.transfer
    new_fn = lambda p: tuple(a + b for a, b in zip(xi_fn(p), theta.fn(p)))
    ret_d = space.metric(yT, U.center)
    value = _current_value(base_cocycle, new_fn, base, yk, yT, pert.n)
    land = _group_dist_exact(value, V.center)
    land_ok = (sym_compare(land, sym(Fraction(V.radius))) < 0 if land is not None and not isinstance(V.radius, float)
               else _group_dist([float(v) for v in value], V.center) < V.radius)
    zeros = [theta.fn(z) for z in [yk, *protect]]
    zero_ok = all(is_exact(v) and v == 0 for vals in zeros for v in vals) if zeros else True
    peak = theta.fn(yT)
    peak_ok = all(_reduce(a - b) == 0 if is_exact(a) else abs(float(a) - float(b)) < 1e-12
                  for a, b in zip(peak, pert.g_tilde))

    def sup_cob(G: int) -> float:
        if isinstance(space, CircleSpace):
            pts = (np.arange(G) / G)[:, None]
        else:
            side = max(8, int(round(G ** (1.0 / space.dim))))
            axes = np.meshgrid(*[np.arange(side) / side] * space.dim, indexing="ij")
            pts = np.stack([a.ravel() for a in axes], axis=1)
        extra = pert.tents.C
        back = (extra - np.array([float(a) for a in base.rotation])[None]) % 1.0
        pts = np.concatenate([pts, extra, back])
        v = theta.fn_array(base.numeric_step(pts)) - theta.fn_array(pts)
        v = v % 1.0
        return float(np.max(np.minimum(v, 1.0 - v)))

    s1, s2 = sup_cob(grid), sup_cob(2 * grid)
    return {"ok": bool(ret_d <= U.radius and land_ok and zero_ok and peak_ok and s1 < eps and s2 < 2 * eps),
            "return_distance": ret_d, "landing_distance": float(land) if land is not None
            else _group_dist([float(v) for v in value], V.center),
            "landing_exact": land is not None, "zeros_exact": zero_ok, "peak_exact": peak_ok,
            "sup_cob": s1, "sup_cob_fine": s2, "eps": eps, "radius": float(pert.radius),
            "return_time": pert.k + pert.n}


# -- greedy builder --------------------------------------------------------


@dataclass(eq=False)
class BuildResult:
    cocycle: Cocycle
    transfer: Cocycle | None
    perturbations: list
    pair_times: dict
    uncovered: list
    base_cocycle: Cocycle | None
    y0: Any
    base: System

    @property
    def complete(self) -> bool:
        return not self.uncovered

    def coverage(self) -> dict:
        return {"pairs": len(self.pair_times) + len(self.uncovered), "covered": len(self.pair_times),
                "uncovered": list(self.uncovered), "perturbations": len(self.perturbations),
                "times": {str(i): t for i, t in sorted(self.pair_times.items())}}

    def to_json(self) -> dict:
        return built_to_json(self)


def _shift(c, v):
    if isinstance(v, SymReal) and not isinstance(c, float):
        return sym_frac(sym(c) - v)
    return (float(c) - float(v)) % 1.0


def _default_schedule(j: int) -> float:
    return 0.1 * 0.9**j


def _find_hit(f_fn, xi_arr, base: System, base_cocycle, y0, U: Ball, V: Ball, horizon: int, dim: int):
    """First time T <= horizon with S^T y0 in U and f^(T)(y0) in V, verified exactly."""
    space = base.space
    e0 = space.encode(y0)[None]
    orb = base.numeric_orbit(e0, horizon + 1)[0]
    uc = space.encode(U.center)
    times = np.flatnonzero(_fdist(orb, uc[None]) < U.radius - 1e-9)
    times = times[times >= 1]
    if len(times) == 0:
        return None, None
    x0 = xi_arr(orb[:1])[0]
    vals = xi_arr(orb[times]) - x0[None]
    if base_cocycle is not None:
        if base_cocycle.constant is None:
            raise ValueError("base cocycle must be constant")
        c = np.array([float(v) for v in base_cocycle.constant])
        vals = vals + times[:, None] * c[None]
    vc = np.array([float(v) for v in V.center])
    close = np.flatnonzero(_fdist(vals % 1.0, vc[None]) < V.radius - 1e-9)
    first_return = int(times[0])
    for i in close[:8]:
        T = int(times[i])
        yT = base.iterate(y0, T)
        value = _current_value(base_cocycle, f_fn, base, y0, yT, T)
        d = _group_dist_exact(value, V.center)
        ok = (sym_compare(d, sym(Fraction(V.radius))) < 0) if d is not None else \
            _group_dist([float(v) for v in value], V.center) < V.radius
        if ok and space.metric(yT, U.center) <= U.radius:
            return T, first_return
    return None, first_return


def build_transitive_cocycle(base: System, net_pairs: Sequence[tuple[Ball, Ball]],
                             eps_schedule: Callable[[int], float] | Sequence[float] | None = None,
                             budget: int = 64, *, y0=None, horizon: int = 100_000, symmetric: bool = False,
                             winding: int = 2, base_cocycle: Cocycle | None = None,
                             strict: bool = True) -> BuildResult:
    """Greedy composition of perturbations, one per uncovered (window, target) pair.

    Each pair (U, V) is covered by a time T with ``S^T y0`` in U and
    ``f^(T)(y0)`` in V.  Later perturbations vanish at ``y0`` and at every
    earlier ``S^T y0``, so earlier certificates survive exactly.
    """
    _need_rotation(base)
    if not net_pairs:
        raise ValueError("no pairs supplied")
    dim = len(net_pairs[0][1].center)
    sched = eps_schedule if callable(eps_schedule) else (
        (lambda j: eps_schedule[min(j, len(eps_schedule) - 1)]) if eps_schedule else _default_schedule)
    y0 = base.space.base_point() if y0 is None else y0
    parts: list[Cocycle] = []
    perts: list[Perturbation] = []
    protect = [y0]
    times: dict[int, int] = {}
    uncovered: list[int] = []

    def current_xi():
        return transfer_sum(parts, dim) if parts else None

    for idx, (U, V) in enumerate(net_pairs):
        xi = current_xi()
        f_fn = xi.fn if xi else (lambda p: tuple(sym(0) for _ in range(dim)))
        xi_arr = xi.fn_array if xi else (lambda e: np.zeros(np.shape(e)[:-1] + (dim,)))
        T, k = _find_hit(f_fn, xi_arr, base, base_cocycle, y0, U, V, horizon, dim)
        if T is not None:
            times[idx] = T
            protect.append(base.iterate(y0, T))
            continue
        if k is None or len(perts) >= budget:
            uncovered.append(idx)
            continue
        eps = sched(len(perts))
        # target for the n-step value at S^k y0: V minus the current k-step value at y0
        yk = base.iterate(y0, k)
        pre = _current_value(base_cocycle, f_fn, base, y0, yk, k)
        shifted = Ball(tuple(_shift(c, v) for c, v in zip(V.center, pre)), V.radius)
        try:
            pert, n = perturb_cocycle(xi, eps, base, y0, (U, shifted), k, horizon=horizon, protect=protect,
                                      symmetric=symmetric, winding=winding, base_cocycle=base_cocycle, dim=dim)
        except ConstructionFailure:
            uncovered.append(idx)
            continue
        if len(pert.tents):
            parts.append(pert.transfer)
        perts.append(pert)
        T = k + n
        times[idx] = T
        protect.append(base.iterate(y0, T))

    xi = current_xi()
    cob = coboundary(xi, base) if xi is not None else zero_cocycle(dim)
    f = cob if base_cocycle is None else base_cocycle + cob
    if xi is not None:
        f.transfer = xi
    f.description = f"built({len(perts)} perturbations{', symmetric' if symmetric else ''})"
    result = BuildResult(f, xi, perts, times, uncovered, base_cocycle, y0, base)
    f.spec = {"kind": "built", "data": None}
    if uncovered and strict:
        raise BudgetExhausted(result)
    return result


def verify_build(result: BuildResult, net_pairs: Sequence[tuple[Ball, Ball]]) -> Report:
    """Recheck every covered pair by two routes: telescoped exact value and a numeric cocycle sum."""
    base, f, y0 = result.base, result.cocycle, result.y0
    xi = result.transfer
    rows = []
    ok = True
    for idx, T in sorted(result.pair_times.items()):
        U, V = net_pairs[idx]
        yT = base.iterate(y0, T)
        fn = xi.fn if xi is not None else (lambda p: tuple(sym(0) for _ in range(len(V.center))))
        exact_val = _current_value(result.base_cocycle, fn, base, y0, yT, T)
        num_val = iterate_cocycle_array(f, base, base.space.encode(y0)[None], T)[0]
        d_exact = _group_dist([float(v) for v in exact_val], V.center)
        d_num = _group_dist(num_val, V.center)
        agree = _group_dist(num_val, [float(v) for v in exact_val])
        good = base.space.metric(yT, U.center) <= U.radius and d_exact < V.radius and agree < 1e-6
        ok &= good
        rows.append({"pair": idx, "time": T, "landing": d_exact, "landing_numeric": d_num, "routes_agree": agree})
    verdict = "pass" if ok and not result.uncovered else "fail"
    return Report("verify_build", verdict, {"pairs": len(net_pairs)},
                  {"rows": rows, "uncovered": result.uncovered, "perturbations": len(result.perturbations)})


# -- serialization -----------------------------------------------------------


def built_to_json(result: BuildResult, table_grid: int = 1024) -> dict:
    tents = result.transfer.tents if result.transfer is not None else TentSum([], [], [], result.cocycle.dim)
    out = {"kind": "built", "dim": result.cocycle.dim, "rotation": [str(a) for a in result.base.rotation],
           "base_cocycle": [str(v) for v in result.base_cocycle.constant] if result.base_cocycle else None,
           "transfer": tents.to_json(), "pair_times": {str(k): v for k, v in sorted(result.pair_times.items())},
           "uncovered": result.uncovered}
    if isinstance(result.base.space, CircleSpace):
        out["table"] = to_table(result.cocycle, table_grid)
    return out


def to_table(f: Cocycle, grid: int = 1024) -> dict:
    g = (np.arange(grid) / grid)[:, None]
    return {"grid": grid, "interpolation": "linear-periodic-shortest-arc",
            "values": f.eval_array(g).round(15).tolist()}


def table_cocycle(table: dict) -> Cocycle:
    """Circle cocycle interpolated from grid values; adjacent values join along the shorter arc."""
    G = int(table["grid"])
    vals = np.asarray(table["values"], dtype=float).reshape(G, -1)
    dim = vals.shape[1]
    step = (np.roll(vals, -1, axis=0) - vals + 0.5) % 1.0 - 0.5

    def arr(e):
        x = (np.asarray(e, dtype=float)[..., 0] % 1.0) * G
        i = np.minimum(np.floor(x).astype(np.int64), G - 1)
        t = (x - i)[..., None]
        return vals[i] + t * step[i]

    lip = float(np.max(np.abs(step))) * G
    return Cocycle(lambda p: tuple(float(v) for v in arr(np.array([float(_angle(p))]))),
                   arr, dim, f"table({G})", lip, None, {"kind": "table", "grid": G})


def built_from_json(d: dict, base: System | None = None) -> Cocycle:
    """Rebuild a serialized builder output: exact from its tents when a base is given, else the table."""
    if base is None:
        if "table" not in d:
            raise ValueError("no base system and no table to interpolate")
        return table_cocycle(d["table"])
    xi = tent_cocycle(TentSum.from_json(d["transfer"]), "transfer")
    f = coboundary(xi, base)
    if d.get("base_cocycle"):
        f = const_cocycle(tuple(parse_sym(v) for v in d["base_cocycle"])) + f
        f.transfer = xi
    f.description = "built"
    return f


CATALOG: dict[str, Callable[..., Cocycle]] = {
    "zero": zero_cocycle,
    "const": const_cocycle,
    "linear": linear_cocycle,
    "sine": sine_cocycle,
    "anzai": anzai_cocycle,
}


def catalog_cocycle(name: str, *args) -> Cocycle:
    if name not in CATALOG:
        raise KeyError(f"unknown cocycle {name!r}; catalog: {', '.join(sorted(CATALOG))}, built")
    return CATALOG[name](*args)
