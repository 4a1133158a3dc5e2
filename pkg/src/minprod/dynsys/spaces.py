"""Phase spaces: metric, float encoding, eps-nets with fast location, samplers.

Every space encodes a point as a fixed-length float vector so that orbits can
be pushed through numpy in bulk.  ``Net.locate`` maps encoded points to the
index of its cell (or -1), which is what the density scans use to mark
covered balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from ..angles import mod1
from ..symreal import SymReal, sym, sym_compare, sym_frac
from .points import CantorWord, Circle, Denjoy, Finite, KleinClass, Product, Quaternion, Solenoid, Torus

HALF = Fraction(1, 2)


@dataclass
class Net:
    """Partition of the space into finitely many cells, each inside an eps-ball.

    Cells are addressed by integer index; ``point(i)`` is a representative
    point of cell ``i`` and ``locate`` maps encoded points to cell indices.
    Every cell lies in the closed ball of radius ``radius <= eps`` about its
    representative, so the representatives form an eps-net and hitting a cell
    means hitting that net ball.  Grids are dyadic, so the partition for a
    larger ``eps`` is coarser than (a union of cells of) the one for a smaller.
    """

    size: int
    point: Callable[[int], Any]
    enc_fn: Callable[[], np.ndarray]
    locate: Callable[[np.ndarray], np.ndarray]
    eps: float
    radius: float = 0.0
    _enc: np.ndarray | None = None

    @property
    def enc(self) -> np.ndarray:
        if self._enc is None:
            self._enc = self.enc_fn()
        return self._enc

    def points(self) -> list:
        return [self.point(i) for i in range(self.size)]


def _rng_fraction(rng: np.random.Generator, bits: int = 30) -> Fraction:
    return Fraction(int(rng.integers(0, 1 << bits)), 1 << bits)


def dyadic_cells(eps: float) -> int:
    """Smallest power of two m with 1/m <= eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps >= 1:
        return 1
    return 1 << math.ceil(math.log2(1.0 / eps) - 1e-12)


def _circ(a: np.ndarray) -> np.ndarray:
    d = np.abs(a) % 1.0
    return np.minimum(d, 1.0 - d)


class Space:
    kind = "abstract"
    dim = 1
    cardinality: int | None = None

    def encode(self, p) -> np.ndarray:
        raise NotImplementedError

    def decode(self, v: np.ndarray):
        raise NotImplementedError

    def dist(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def metric(self, p, q) -> float:
        return float(self.dist(self.encode(p), self.encode(q)))

    def contains(self, p) -> bool:
        raise NotImplementedError

    def net(self, eps: float) -> Net:
        raise NotImplementedError

    def base_point(self):
        raise NotImplementedError

    def sample(self, count: int, seed: int = 0) -> list:
        """``count`` points; the first is always the base point."""
        rng = np.random.default_rng(seed)
        return [self.base_point()] + [self._random(rng) for _ in range(count - 1)]

    def _random(self, rng):
        raise NotImplementedError

    def ball_grid(self, center, radius: float, per_axis: int = 5) -> np.ndarray:
        """Encoded points inside the closed ball; default is the center alone."""
        return self.encode(center)[None, :]

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash(type(self))


def _coord_ok(x) -> bool:
    if isinstance(x, SymReal):
        return sym_frac(x) == x
    v = float(x)
    return 0.0 <= v < 1.0


class CircleSpace(Space):
    kind = "circle"
    dim = 1

    def encode(self, p: Circle) -> np.ndarray:
        return np.array([float(p.s) % 1.0])

    def decode(self, v) -> Circle:
        return Circle(sym_frac(sym(Fraction(float(v[0])))))

    def dist(self, a, b):
        return _circ(np.asarray(a)[..., 0] - np.asarray(b)[..., 0])

    def contains(self, p) -> bool:
        return isinstance(p, Circle) and _coord_ok(p.s)

    def base_point(self) -> Circle:
        return Circle(sym(0))

    def _random(self, rng) -> Circle:
        return Circle(sym(_rng_fraction(rng)))

    def net(self, eps: float) -> Net:
        # centered arcs of length 1/m <= 2 eps
        m = dyadic_cells(2 * eps)

        def locate(enc):
            return np.floor(enc[..., 0] * m).astype(np.int64) % m

        return Net(m, lambda i: Circle(sym(Fraction(2 * i + 1, 2 * m))),
                   lambda: ((np.arange(m) + 0.5) / m)[:, None], locate, eps, 0.5 / m)

    def ball_grid(self, center, radius, per_axis=5):
        c = self.encode(center)
        off = np.linspace(-radius, radius, per_axis)
        return ((c[0] + off) % 1.0)[:, None]


class TorusSpace(Space):
    kind = "torus"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("torus dimension must be positive")
        self.n = n
        self.dim = n

    def encode(self, p: Torus) -> np.ndarray:
        return np.array([float(c) % 1.0 for c in p.coords])

    def decode(self, v) -> Torus:
        return Torus(tuple(sym_frac(sym(Fraction(float(x)))) for x in v))

    def dist(self, a, b):
        return _circ(np.asarray(a) - np.asarray(b)).max(axis=-1)

    def contains(self, p) -> bool:
        return isinstance(p, Torus) and p.dim == self.n and all(_coord_ok(c) for c in p.coords)

    def base_point(self) -> Torus:
        return Torus(tuple(sym(0) for _ in range(self.n)))

    def _random(self, rng) -> Torus:
        return Torus(tuple(sym(_rng_fraction(rng)) for _ in range(self.n)))

    def net(self, eps: float) -> Net:
        m = dyadic_cells(2 * eps)
        n = self.n
        radix = m ** np.arange(n - 1, -1, -1)

        def point(i):
            out = []
            for _ in range(n):
                i, r = divmod(i, m)
                out.append(r)
            return Torus(tuple(sym(Fraction(2 * j + 1, 2 * m)) for j in reversed(out)))

        def enc_fn():
            g = np.stack(np.meshgrid(*[np.arange(m)] * n, indexing="ij"), axis=-1).reshape(-1, n)
            return (g + 0.5) / m

        def locate(enc):
            j = np.floor(enc * m).astype(np.int64) % m
            return j @ radix

        return Net(m**n, point, enc_fn, locate, eps, 0.5 / m)

    def ball_grid(self, center, radius, per_axis=5):
        c = self.encode(center)
        off = np.linspace(-radius, radius, per_axis)
        g = np.stack(np.meshgrid(*[off] * self.n, indexing="ij"), axis=-1).reshape(-1, self.n)
        return (c + g) % 1.0


class CantorSpace(Space):
    """Words of length ``depth`` over ``base`` symbols; encoded as their integer value."""

    kind = "cantor"
    dim = 1

    def __init__(self, base: int = 2, depth: int = 20):
        if base < 2 or depth < 1:
            raise ValueError("need base >= 2 and depth >= 1")
        self.base = base
        self.depth = depth
        self.cardinality = base**depth
        if self.cardinality >= 2**53:
            raise ValueError("word space too large for the float encoding")

    def encode(self, p: CantorWord) -> np.ndarray:
        return np.array([float(p.to_int())])

    def decode(self, v) -> CantorWord:
        return CantorWord.from_int(int(v[0]), self.base, self.depth)

    def dist(self, a, b):
        a = np.asarray(a)[..., 0].astype(np.int64)
        b = np.asarray(b)[..., 0].astype(np.int64)
        diff = a - b
        out = np.zeros(np.broadcast(a, b).shape)
        done = diff == 0
        for i in range(self.depth):
            hit = ~done & (diff % self.base ** (i + 1) != 0)
            out[hit] = 2.0**-i
            done |= hit
        return out

    def exact_distance(self, p: CantorWord, q: CantorWord) -> Fraction:
        for i, (s, t) in enumerate(zip(p.symbols, q.symbols)):
            if s != t:
                return Fraction(1, 2**i)
        return Fraction(0)

    def contains(self, p) -> bool:
        return (isinstance(p, CantorWord) and p.base == self.base and len(p.symbols) == self.depth
                and all(0 <= s < self.base for s in p.symbols))

    def base_point(self) -> CantorWord:
        return CantorWord((0,) * self.depth, self.base)

    def _random(self, rng) -> CantorWord:
        return CantorWord(tuple(int(s) for s in rng.integers(0, self.base, self.depth)), self.base)

    def cylinder_radius(self, k: int) -> float:
        """Largest distance between words sharing their first k symbols."""
        return 0.0 if k >= self.depth else 2.0**-k

    def prefix_length(self, eps: float) -> int:
        if eps >= 1:
            return 0
        return min(self.depth, math.ceil(math.log2(1.0 / eps)))

    def net(self, eps: float) -> Net:
        k = self.prefix_length(eps)
        size = self.base**k

        def locate(enc):
            return enc[..., 0].astype(np.int64) % size

        return Net(size, lambda i: CantorWord.from_int(i, self.base, self.depth),
                   lambda: np.arange(size, dtype=float)[:, None], locate, eps, self.cylinder_radius(k))


class FiniteSpace(Space):
    kind = "finite"
    dim = 1

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("need at least one point")
        self.k = k
        self.cardinality = k

    def encode(self, p: Finite) -> np.ndarray:
        return np.array([float(p.index)])

    def decode(self, v) -> Finite:
        return Finite(int(v[0]), self.k)

    def dist(self, a, b):
        return (np.asarray(a)[..., 0] != np.asarray(b)[..., 0]).astype(float)

    def contains(self, p) -> bool:
        return isinstance(p, Finite) and p.cardinality == self.k and 0 <= p.index < self.k

    def base_point(self) -> Finite:
        return Finite(0, self.k)

    def _random(self, rng) -> Finite:
        return Finite(int(rng.integers(0, self.k)), self.k)

    def net(self, eps: float) -> Net:
        if eps >= 1:
            return Net(1, lambda i: Finite(0, self.k), lambda: np.zeros((1, 1)),
                       lambda enc: np.zeros(enc.shape[:-1], dtype=np.int64), eps, 1.0)
        return Net(self.k, lambda i: Finite(i, self.k), lambda: np.arange(self.k, dtype=float)[:, None],
                   lambda enc: enc[..., 0].astype(np.int64), eps, 0.0)


class SolenoidSpace(Space):
    """Mapping torus of a word-space map ``h`` given by its exact step and a numeric power."""

    kind = "solenoid"
    dim = 2

    def __init__(self, base: CantorSpace, h_step: Callable, h_fstep: Callable, name: str = "h"):
        self.base = base
        self.h_step = h_step
        self.h_fstep = h_fstep
        self.name = name

    def __eq__(self, other) -> bool:
        return isinstance(other, SolenoidSpace) and other.base == self.base and other.name == self.name

    __hash__ = Space.__hash__

    def encode(self, p: Solenoid) -> np.ndarray:
        return np.array([float(p.base.to_int()), float(p.height) % 1.0])

    def decode(self, v) -> Solenoid:
        return Solenoid(self.base.decode(v[:1]), sym_frac(sym(Fraction(float(v[1])))))

    def dist(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        a, b = np.broadcast_arrays(a, b)
        ds = np.abs(a[..., 1] - b[..., 1])
        direct = np.maximum(self.base.dist(a[..., :1], b[..., :1]), ds)
        # paths through the glued edge (y, 1) ~ (h(y), 0)
        ha = self.h_fstep(a[..., :1])
        hb = self.h_fstep(b[..., :1])
        via_a = np.maximum(self.base.dist(ha, b[..., :1]), 1.0 - a[..., 1] + b[..., 1])
        via_b = np.maximum(self.base.dist(a[..., :1], hb), 1.0 - b[..., 1] + a[..., 1])
        return np.minimum(direct, np.minimum(via_a, via_b))

    def contains(self, p) -> bool:
        return isinstance(p, Solenoid) and self.base.contains(p.base) and _coord_ok(p.height)

    def base_point(self) -> Solenoid:
        return Solenoid(self.base.base_point(), sym(0))

    def _random(self, rng) -> Solenoid:
        return Solenoid(self.base._random(rng), sym(_rng_fraction(rng)))

    def net(self, eps: float) -> Net:
        k = self.base.prefix_length(eps)
        size_b = self.base.base**k
        m = dyadic_cells(2 * eps)

        def point(i):
            c, j = divmod(i, m)
            return Solenoid(CantorWord.from_int(c, self.base.base, self.base.depth), sym(Fraction(2 * j + 1, 2 * m)))

        def enc_fn():
            c, j = np.divmod(np.arange(size_b * m), m)
            return np.stack([c.astype(float), (j + 0.5) / m], axis=-1)

        def locate(enc):
            c = enc[..., 0].astype(np.int64) % size_b
            j = np.minimum(np.floor(enc[..., 1] * m).astype(np.int64), m - 1)
            return c * m + j

        return Net(size_b * m, point, enc_fn, locate, eps, max(self.base.cylinder_radius(k), 0.5 / m))


class SphereSpace(Space):
    """Unit quaternions with the chordal metric."""

    kind = "sphere3"
    dim = 4

    def encode(self, p: Quaternion) -> np.ndarray:
        return np.array(p.as_tuple())

    def decode(self, v) -> Quaternion:
        return Quaternion(*(float(x) for x in v))

    def dist(self, a, b):
        return np.linalg.norm(np.asarray(a) - np.asarray(b), axis=-1)

    def contains(self, p) -> bool:
        return isinstance(p, Quaternion) and abs(math.sqrt(sum(c * c for c in p.as_tuple())) - 1) <= 1e-12

    def base_point(self) -> Quaternion:
        return Quaternion(1.0, 0.0, 0.0, 0.0)

    def _random(self, rng) -> Quaternion:
        return Quaternion(*(float(x) for x in rng.standard_normal(4)))

    def net(self, eps: float) -> Net:
        # dyadic cubes of side h <= eps/2 have diameter 2h <= eps; keep the ones meeting the sphere
        h = 1.0 / dyadic_cells(eps / 2.0)
        g = round(2.0 / h)
        lows = -1.0 + h * np.arange(g)
        radix = g ** np.arange(3, -1, -1)
        slab = np.stack(np.meshgrid(lows, lows, lows, indexing="ij"), axis=-1).reshape(-1, 3)
        all_pts, all_cells = [], []
        # one slab of the first coordinate at a time keeps memory at O(g^3)
        for i0, w in enumerate(lows):
            grid = np.concatenate([np.full((len(slab), 1), w), slab], axis=1)
            near = np.clip(0.0, grid, grid + h)
            far = np.where(np.abs(grid) > np.abs(grid + h), grid, grid + h)
            keep = (np.linalg.norm(near, axis=-1) <= 1.0) & (np.linalg.norm(far, axis=-1) >= 1.0)
            if not keep.any():
                continue
            near, far = near[keep], far[keep]
            d = far - near
            # solve |near + t d| = 1 for t in [0, 1]
            qa = (d * d).sum(-1)
            qb = 2 * (near * d).sum(-1)
            qc = (near * near).sum(-1) - 1.0
            t = (-qb + np.sqrt(np.maximum(qb * qb - 4 * qa * qc, 0.0))) / (2 * np.where(qa > 0, qa, 1.0))
            pts = near + np.clip(t, 0.0, 1.0)[:, None] * d
            pts /= np.linalg.norm(pts, axis=-1, keepdims=True)
            cells = np.flatnonzero(keep) + i0 * g**3
            # cubes touching the sphere only on their excluded upper faces own no point
            own = (np.clip(np.floor((pts + 1.0) / h).astype(np.int64), 0, g - 1) @ radix) == cells
            all_pts.append(pts[own])
            all_cells.append(cells[own])
        pts = np.concatenate(all_pts)
        cells = np.concatenate(all_cells)

        def locate(enc):
            j = np.clip(np.floor((np.asarray(enc) + 1.0) / h).astype(np.int64), 0, g - 1) @ radix
            k = np.minimum(np.searchsorted(cells, j), len(cells) - 1)
            return np.where(cells[k] == j, k, -1)

        return Net(len(pts), lambda i: Quaternion(*pts[i]), lambda: pts, locate, eps, 2.0 * h)


class ProductSpace(Space):
    kind = "product"

    def __init__(self, left: Space, right: Space):
        self.left = left
        self.right = right
        self.dim = left.dim + right.dim
        if left.cardinality is not None and right.cardinality is not None:
            self.cardinality = left.cardinality * right.cardinality

    def split(self, enc):
        return enc[..., : self.left.dim], enc[..., self.left.dim:]

    def encode(self, p: Product) -> np.ndarray:
        return np.concatenate([self.left.encode(p.left), self.right.encode(p.right)])

    def decode(self, v) -> Product:
        a, b = self.split(np.asarray(v))
        return Product(self.left.decode(a), self.right.decode(b))

    def dist(self, a, b):
        a1, a2 = self.split(np.asarray(a))
        b1, b2 = self.split(np.asarray(b))
        return np.maximum(self.left.dist(a1, b1), self.right.dist(a2, b2))

    def contains(self, p) -> bool:
        return isinstance(p, Product) and self.left.contains(p.left) and self.right.contains(p.right)

    def base_point(self) -> Product:
        return Product(self.left.base_point(), self.right.base_point())

    def sample(self, count: int, seed: int = 0) -> list:
        a = self.left.sample(count, seed)
        b = self.right.sample(count, seed + 7919)
        return [Product(x, y) for x, y in zip(a, b)]

    def _random(self, rng) -> Product:
        return Product(self.left._random(rng), self.right._random(rng))

    def net(self, eps: float) -> Net:
        na, nb = self.left.net(eps), self.right.net(eps)

        def enc_fn():
            ea, eb = na.enc, nb.enc
            return np.concatenate([np.repeat(ea, nb.size, axis=0), np.tile(eb, (na.size, 1))], axis=1)

        def locate(enc):
            a, b = self.split(enc)
            ia, ib = na.locate(a), nb.locate(b)
            return np.where((ia >= 0) & (ib >= 0), ia * nb.size + ib, -1)

        return Net(na.size * nb.size, lambda i: Product(na.point(i // nb.size), nb.point(i % nb.size)),
                   enc_fn, locate, eps, max(na.radius, nb.radius))

    def ball_grid(self, center, radius, per_axis=5):
        a = self.left.ball_grid(center.left, radius, per_axis)
        b = self.right.ball_grid(center.right, radius, per_axis)
        return np.concatenate([np.repeat(a, len(b), axis=0), np.tile(b, (len(a), 1))], axis=1)


def klein_canonical(g, z) -> tuple:
    """Representative of {(g, z), (g + 1/2, -z)} with g in [0, 1/2)."""
    g, z = mod1(g), mod1(z)
    if isinstance(g, SymReal):
        if sym_compare(g, HALF) >= 0:
            return g - HALF, mod1(-z)
        return g, z
    if float(g) >= 0.5:
        return mod1(g - 0.5), mod1(-z)
    return g, z


def klein_canonical_array(enc: np.ndarray) -> np.ndarray:
    g = enc[..., 0] % 1.0
    z = enc[..., 1] % 1.0
    flip = g >= 0.5
    g = np.where(flip, g - 0.5, g)
    z = np.where(flip, (-z) % 1.0, z)
    return np.stack([g, z], axis=-1)


class KleinSpace(Space):
    kind = "klein"
    dim = 2

    def encode(self, p: KleinClass) -> np.ndarray:
        return klein_canonical_array(np.array([float(c) % 1.0 for c in p.rep.coords]))

    def decode(self, v) -> KleinClass:
        g, z = (sym(Fraction(float(x))) for x in v)
        return KleinClass(Torus(klein_canonical(g, z)))

    def dist(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        other = np.stack([b[..., 0] + 0.5, -b[..., 1]], axis=-1)
        return np.minimum(_circ(a - b).max(axis=-1), _circ(a - other).max(axis=-1))

    def contains(self, p) -> bool:
        if not isinstance(p, KleinClass) or p.rep.dim != 2 or not all(_coord_ok(c) for c in p.rep.coords):
            return False
        g = p.rep.coords[0]
        return sym_compare(g, HALF) < 0 if isinstance(g, SymReal) else float(g) < 0.5

    def base_point(self) -> KleinClass:
        return KleinClass(Torus((sym(0), sym(0))))

    def _random(self, rng) -> KleinClass:
        return KleinClass(Torus(klein_canonical(sym(_rng_fraction(rng)), sym(_rng_fraction(rng)))))

    def net(self, eps: float) -> Net:
        m = max(2, dyadic_cells(2 * eps))
        half = m // 2

        def point(i):
            j, k = divmod(i, m)
            return KleinClass(Torus((sym(Fraction(2 * j + 1, 2 * m)), sym(Fraction(2 * k + 1, 2 * m)))))

        def enc_fn():
            j, k = np.divmod(np.arange(half * m), m)
            return np.stack([(j + 0.5) / m, (k + 0.5) / m], axis=-1)

        def locate(enc):
            c = klein_canonical_array(enc)
            j = np.minimum(np.floor(c[..., 0] * m).astype(np.int64), half - 1)
            k = np.floor(c[..., 1] * m).astype(np.int64) % m
            return j * m + k

        return Net(half * m, point, enc_fn, locate, eps, 0.5 / m)
