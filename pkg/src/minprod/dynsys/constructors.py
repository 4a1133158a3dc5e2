"""Concrete systems: rotations, odometers, suspensions, S^3 translations, finite cycles."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..angles import mod1
from ..symreal import SymReal, const, sym, sym_floor, sym_frac
from .points import CantorWord, Circle, Finite, Product, Quaternion, Solenoid, Torus
from .spaces import CantorSpace, CircleSpace, FiniteSpace, ProductSpace, SolenoidSpace, SphereSpace, TorusSpace
from .system import Obstruction, System


def _exact(a) -> SymReal:
    return a if isinstance(a, SymReal) else sym(a)


def _as_times(enc0: np.ndarray, ns) -> np.ndarray:
    ns = np.asarray(ns)
    if ns.ndim == 1:
        ns = np.broadcast_to(ns, (enc0.shape[0], ns.shape[0]))
    return ns


def _rotation_period(alphas) -> float | int:
    q = 1
    for a in alphas:
        if not a.is_rational:
            return math.inf
        q = math.lcm(q, a.rat.denominator)
    return q


def _frac_float(a: SymReal) -> float:
    return float(sym_frac(a))


def circle_rotation(alpha) -> System:
    alpha = _exact(alpha)
    af = _frac_float(alpha)
    period = _rotation_period([alpha])

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        return ((enc0[:, None, :1] + ns[..., None] * af) % 1.0)

    return System(
        space=CircleSpace(),
        step=lambda p: Circle(mod1(p.s + alpha)),
        inverse=lambda p: Circle(mod1(p.s - alpha)),
        power=lambda p, m: Circle(mod1(p.s + alpha * m)),
        name=f"rot({alpha})",
        params={"alpha": alpha},
        fstep=lambda e: (e + af) % 1.0,
        orbit_at=orbit_at,
        period=lambda p: period,
        rotation=(alpha,),
        coords=lambda p: (p.s,),
        fcoords=lambda e: e[..., :1],
    )


def torus_rotation(alphas: Sequence) -> System:
    alphas = tuple(_exact(a) for a in alphas)
    if not alphas:
        raise ValueError("need at least one rotation angle")
    af = np.array([_frac_float(a) for a in alphas])
    period = _rotation_period(alphas)

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        return (enc0[:, None, :] + ns[..., None] * af) % 1.0

    return System(
        space=TorusSpace(len(alphas)),
        step=lambda p: Torus(tuple(mod1(c + a) for c, a in zip(p.coords, alphas))),
        inverse=lambda p: Torus(tuple(mod1(c - a) for c, a in zip(p.coords, alphas))),
        power=lambda p, m: Torus(tuple(mod1(c + a * m) for c, a in zip(p.coords, alphas))),
        name="rot(" + ", ".join(str(a) for a in alphas) + ")",
        params={"alphas": alphas},
        fstep=lambda e: (e + af) % 1.0,
        orbit_at=orbit_at,
        period=lambda p: period,
        rotation=alphas,
        coords=lambda p: tuple(p.coords),
        fcoords=lambda e: e,
    )


def odometer(b: int = 2, depth: int = 20) -> System:
    """Add one with carry, least-significant symbol first; wraps past the last digit."""
    space = CantorSpace(b, depth)
    size = space.cardinality

    def step(w: CantorWord) -> CantorWord:
        s = list(w.symbols)
        for i in range(depth):
            if s[i] + 1 < b:
                s[i] += 1
                break
            s[i] = 0
        return CantorWord(tuple(s), b)

    def inverse(w: CantorWord) -> CantorWord:
        s = list(w.symbols)
        for i in range(depth):
            if s[i] > 0:
                s[i] -= 1
                break
            s[i] = b - 1
        return CantorWord(tuple(s), b)

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        v = enc0[:, None, 0].astype(np.int64)
        return ((v + ns) % size).astype(float)[..., None]

    return System(
        space=space,
        step=step,
        inverse=inverse,
        power=lambda w, m: CantorWord.from_int(w.to_int() + m, b, depth),
        name=f"odometer({b},{depth})",
        params={"b": b, "depth": depth},
        fstep=lambda e: (e + 1.0) % size,
        orbit_at=orbit_at,
        period=lambda p: size,
    )


def suspension_time_t(h: System, t) -> System:
    """Time-t map of the suspension flow over ``h``: (y, s) -> (h^floor(t+s) y, frac(t+s))."""
    if not isinstance(h.space, CantorSpace):
        raise TypeError("suspension needs a system on a word space")
    if h.power is None or h.orbit_at is None:
        raise TypeError("suspension needs exact and numeric powers of h")
    t = _exact(t)
    tf = float(t)
    space = SolenoidSpace(h.space, h.step, h.fstep or (lambda e: h.orbit_at(e.reshape(-1, 1), [1]).reshape(e.shape)), h.name)

    def shift(p: Solenoid, tt) -> Solenoid:
        s = p.height + tt
        m = sym_floor(s) if isinstance(s, SymReal) else math.floor(s)
        return Solenoid(h.iterate(p.base, m), s - m)

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        total = enc0[:, None, 1] + ns * tf
        m = np.floor(total)
        base = h.orbit_at(enc0[:, :1], m.astype(np.int64))
        return np.concatenate([base, (total - m)[..., None]], axis=-1)

    def fstep(e):
        flat = np.asarray(e).reshape(-1, 2)
        return orbit_at(flat, np.array([1]))[:, 0].reshape(np.shape(e))

    return System(
        space=space,
        step=lambda p: shift(p, t),
        inverse=lambda p: shift(p, -t),
        power=lambda p, m: shift(p, t * m),
        name=f"suspension({h.name}, t={t})",
        params={"h": h.name, "t": t},
        fstep=fstep,
        orbit_at=orbit_at,
    )


class SuspensionFlow:
    """The flow (y, s) -> (h^floor(t+s) y, frac(t+s)) as a family of time-t maps."""

    def __init__(self, h: System):
        self.h = h

    def at(self, t) -> System:
        return suspension_time_t(self.h, t)

    def __call__(self, t) -> System:
        return self.at(t)


class LinearFlow:
    """Straight-line flow on the torus in a fixed direction."""

    def __init__(self, direction: Sequence):
        self.direction = tuple(_exact(d) for d in direction)

    def at(self, t) -> System:
        t = Fraction(t) if not isinstance(t, SymReal) else t
        return torus_rotation([d * t for d in self.direction])

    def __call__(self, t) -> System:
        return self.at(t)


def _qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=-1)


def circle_subgroup_element(turns) -> Quaternion:
    """``(cos 2 pi t, sin 2 pi t, 0, 0)`` for a turn fraction ``t``."""
    a = 2 * math.pi * float(sym_frac(_exact(turns)))
    return Quaternion(math.cos(a), math.sin(a), 0.0, 0.0)


def _orthogonal_unit(u: np.ndarray) -> np.ndarray:
    for e in np.eye(3)[[1, 2, 0]]:
        v = e - (e @ u) * u
        if np.linalg.norm(v) > 0.5:
            return v / np.linalg.norm(v)
    raise AssertionError("unreachable")


def s3_translation(g: Quaternion, turns=None) -> System:
    """Left translation ``q -> g q`` on unit quaternions.

    ``turns`` optionally records an exact turn fraction for ``g`` so the period
    hook can decide finiteness of orbits.
    """
    ga = np.array(g.as_tuple())
    vnorm = float(np.linalg.norm(ga[1:]))
    theta = math.atan2(vnorm, ga[0])
    u = ga[1:] / vnorm if vnorm > 0 else np.array([1.0, 0.0, 0.0])

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        ang = ns * theta
        gn = np.concatenate([np.cos(ang)[..., None], np.sin(ang)[..., None] * u], axis=-1)
        return _qmul(gn, enc0[:, None, :])

    if turns is not None:
        t = sym_frac(_exact(turns))
        per = t.rat.denominator if t.is_rational else math.inf
        period = lambda p: per
    elif vnorm == 0 and ga[0] > 0:
        period = lambda p: 1
    else:
        period = None

    def obstruction(x0, net=None, uncovered=None):
        # g^n lies in span(1, u); a unit imaginary v orthogonal to u gives
        # |g^n q0 - v q0| = |g^n - v| = sqrt(2) for every n
        v = Quaternion(0.0, *_orthogonal_unit(u))
        w = v * x0
        return Obstruction(
            kind="invariant-set",
            description="orbit stays in the coset of a one-parameter subgroup",
            witness=w,
            distance=math.sqrt(2.0),
            details={"axis": [float(c) for c in u], "orthogonal_direction": list(v.as_tuple()),
                     "distance_exact": const("sqrt2")},
        )

    gc = g.conj()
    return System(
        space=SphereSpace(),
        step=lambda q: g * q,
        inverse=lambda q: gc * q,
        name=f"s3({g.w:.6g},{g.x:.6g},{g.y:.6g},{g.z:.6g})",
        params={"g": g.as_tuple(), "turns": turns},
        fstep=lambda e: _qmul(np.broadcast_to(ga, np.shape(e)), e),
        orbit_at=orbit_at,
        period=period,
        obstruction=obstruction,
    )


def cyclic_system(k: int) -> System:
    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        return ((enc0[:, None, 0].astype(np.int64) + ns) % k).astype(float)[..., None]

    return System(
        space=FiniteSpace(k),
        step=lambda p: Finite((p.index + 1) % k, k),
        inverse=lambda p: Finite((p.index - 1) % k, k),
        power=lambda p, m: Finite((p.index + m) % k, k),
        name=f"cyclic({k})",
        params={"k": k},
        fstep=lambda e: (e + 1.0) % k,
        orbit_at=orbit_at,
        period=lambda p: k,
    )


def _two_circle_space() -> ProductSpace:
    return ProductSpace(FiniteSpace(2), CircleSpace())


def two_circles_base(alpha) -> System:
    """T(0, z) = (1, z), T(1, z) = (0, z + alpha) on two disjoint circles."""
    alpha = _exact(alpha)
    af = _frac_float(alpha)
    per = _rotation_period([alpha])
    per = per if per == math.inf else 2 * per

    def step(p):
        i, z = p.left.index, p.right.s
        return Product(Finite(1, 2), Circle(z)) if i == 0 else Product(Finite(0, 2), Circle(mod1(z + alpha)))

    def inverse(p):
        i, z = p.left.index, p.right.s
        return Product(Finite(0, 2), Circle(z)) if i == 1 else Product(Finite(1, 2), Circle(mod1(z - alpha)))

    def power(p, m):
        i, z = p.left.index, p.right.s
        c = (m + i) // 2
        return Product(Finite((i + m) % 2, 2), Circle(mod1(z + alpha * c)))

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        i0 = enc0[:, None, 0].astype(np.int64)
        c = (ns + i0) // 2
        return np.stack([((i0 + ns) % 2).astype(float), (enc0[:, None, 1] + c * af) % 1.0], axis=-1)

    return System(
        space=_two_circle_space(),
        step=step,
        inverse=inverse,
        power=power,
        name=f"two_circles({alpha})",
        params={"alpha": alpha},
        fstep=lambda e: orbit_at(e.reshape(-1, 2), np.array([1]))[:, 0].reshape(e.shape),
        orbit_at=orbit_at,
        period=lambda p: per,
    )


def two_circles_skew(alpha, beta) -> System:
    """F(x, y) = (T x, S_x y): S_x is the identity over circle 0 and
    (i, xi) -> (1 - i, xi + beta) over circle 1."""
    alpha, beta = _exact(alpha), _exact(beta)
    af, bf = _frac_float(alpha), _frac_float(beta)
    base = two_circles_base(alpha)
    pa, pb = _rotation_period([alpha]), _rotation_period([beta])
    per = math.inf if math.inf in (pa, pb) else 2 * math.lcm(2, pa, pb)

    def step(p):
        x, y = p.left, p.right
        if x.left.index == 1:
            y = Product(Finite(1 - y.left.index, 2), Circle(mod1(y.right.s + beta)))
        return Product(base.step(x), y)

    def inverse(p):
        x = base.inverse(p.left)
        y = p.right
        if x.left.index == 1:
            y = Product(Finite(1 - y.left.index, 2), Circle(mod1(y.right.s - beta)))
        return Product(x, y)

    def power(p, m):
        i = p.left.left.index
        c = (m + i) // 2
        y = p.right
        y = Product(Finite((y.left.index + c) % 2, 2), Circle(mod1(y.right.s + beta * c)))
        return Product(base.power(p.left, m), y)

    def orbit_at(enc0, ns):
        ns = _as_times(enc0, ns)
        i0 = enc0[:, None, 0].astype(np.int64)
        j0 = enc0[:, None, 2].astype(np.int64)
        c = (ns + i0) // 2
        return np.stack([
            ((i0 + ns) % 2).astype(float),
            (enc0[:, None, 1] + c * af) % 1.0,
            ((j0 + c) % 2).astype(float),
            (enc0[:, None, 3] + c * bf) % 1.0,
        ], axis=-1)

    return System(
        space=ProductSpace(_two_circle_space(), _two_circle_space()),
        step=step,
        inverse=inverse,
        power=power,
        name=f"two_circles_skew({alpha}, {beta})",
        params={"alpha": alpha, "beta": beta},
        fstep=lambda e: orbit_at(e.reshape(-1, 4), np.array([1]))[:, 0].reshape(e.shape),
        orbit_at=orbit_at,
        period=lambda p: per,
    )
