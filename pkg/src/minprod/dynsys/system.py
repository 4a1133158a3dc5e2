"""System descriptors: a space, an exact step, and optional numeric fast paths."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterator

import numpy as np

from .spaces import Space


@dataclass(frozen=True)
class Ball:
    """Closed ball: a space point (or a group element tuple) and a radius."""

    center: Any
    radius: float


@dataclass
class Obstruction:
    """Exact reason an orbit closure misses part of the space."""

    kind: str
    description: str
    witness: Any = None
    distance: float | None = None
    details: dict = field(default_factory=dict)


@dataclass(eq=False)
class System:
    """A phase space and a step map.

    Exact work goes through ``step``/``inverse``/``power`` on symbolic points.
    Numeric work goes through ``orbit_at`` (closed form at arbitrary times),
    ``orbit_iter`` (stateful chunked iteration) or, failing both, ``fstep``.
    ``rotation``/``coords``/``fcoords`` are set when the system is a torus
    translation in suitable coordinates; ``period`` returns an exact period,
    ``math.inf`` for a provably infinite orbit, or None when unknown.
    """

    space: Space
    step: Callable
    name: str
    inverse: Callable | None = None
    params: dict = field(default_factory=dict)
    fstep: Callable | None = None
    orbit_at: Callable | None = None
    orbit_iter: Callable | None = None
    power: Callable | None = None
    period: Callable | None = None
    rotation: tuple | None = None
    coords: Callable | None = None
    fcoords: Callable | None = None
    obstruction: Callable | None = None

    def __repr__(self) -> str:
        return f"System({self.name})"

    def with_name(self, name: str) -> System:
        return replace(self, name=name)

    def iterate(self, p, m: int):
        """Exact ``S^m(p)``; negative ``m`` needs an inverse or a power hook."""
        if self.power is not None:
            return self.power(p, m)
        if m < 0:
            if self.inverse is None:
                raise ValueError(f"{self.name} has no inverse")
            for _ in range(-m):
                p = self.inverse(p)
            return p
        for _ in range(m):
            p = self.step(p)
        return p

    def orbit(self, p, n: int) -> list:
        """Exact points ``p, S p, ..., S^(n-1) p``."""
        out = []
        for _ in range(n):
            out.append(p)
            p = self.step(p)
        return out

    def encode_many(self, pts) -> np.ndarray:
        return np.stack([self.space.encode(p) for p in pts])

    def chunks(self, enc0: np.ndarray, start: int, stop: int, chunk: int = 1 << 14) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(t0, block)`` with ``block[b, j]`` the encoded point at time ``t0 + j``."""
        enc0 = np.atleast_2d(np.asarray(enc0, dtype=float))
        if self.orbit_at is not None:
            for t0 in range(start, stop, chunk):
                t1 = min(stop, t0 + chunk)
                yield t0, self.orbit_at(enc0, np.arange(t0, t1))
            return
        it = self.orbit_iter(enc0, stop, chunk) if self.orbit_iter is not None else _fstep_iter(self.fstep, enc0, stop, chunk)
        for t0, block in it:
            t1 = t0 + block.shape[1]
            if t1 <= start:
                continue
            if t0 < start:
                block, t0 = block[:, start - t0:], start
            yield t0, block

    def numeric_orbit(self, enc0: np.ndarray, n: int) -> np.ndarray:
        """Encoded orbit at times ``0..n-1`` as an array (B, n, dim)."""
        parts = [blk for _, blk in self.chunks(enc0, 0, n)]
        return np.concatenate(parts, axis=1)

    def numeric_step(self, enc: np.ndarray) -> np.ndarray:
        if self.fstep is not None:
            return self.fstep(enc)
        flat = np.asarray(enc).reshape(-1, self.space.dim)
        out = self.numeric_orbit(flat, 2)[:, 1]
        return out.reshape(np.shape(enc))


def _fstep_iter(fstep, enc0, stop, chunk):
    if fstep is None:
        raise ValueError("system has no numeric step")
    cur = enc0.copy()
    t = 0
    while t < stop:
        c = min(chunk, stop - t)
        block = np.empty((cur.shape[0], c, cur.shape[1]))
        for j in range(c):
            block[:, j] = cur
            cur = fstep(cur)
        yield t, block
        t += c


def orbit_iter_from_fstep(fstep):
    return lambda enc0, stop, chunk: _fstep_iter(fstep, enc0, stop, chunk)


def combine_periods(a, b):
    """Period of a product point from the factor periods."""
    if a == math.inf or b == math.inf:
        return math.inf
    if a is None or b is None:
        return None
    return math.lcm(a, b)
