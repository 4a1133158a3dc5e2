"""Tagged point types for every phase space in the package."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, is_dataclass
from typing import Any

from ..angles import mod1


@dataclass(frozen=True)
class Circle:
    s: Any

    @classmethod
    def of(cls, s) -> Circle:
        return cls(mod1(s))


@dataclass(frozen=True)
class Torus:
    coords: tuple

    @classmethod
    def of(cls, coords) -> Torus:
        return cls(tuple(mod1(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class CantorWord:
    """Finite word, least-significant symbol first."""

    symbols: tuple
    base: int = 2

    @classmethod
    def from_int(cls, value: int, base: int, depth: int) -> CantorWord:
        value %= base**depth
        out = []
        for _ in range(depth):
            value, r = divmod(value, base)
            out.append(r)
        return cls(tuple(out), base)

    def to_int(self) -> int:
        v = 0
        for s in reversed(self.symbols):
            v = v * self.base + s
        return v

    def __str__(self) -> str:
        return "".join(str(s) for s in self.symbols)


@dataclass(frozen=True)
class Solenoid:
    base: CantorWord
    height: Any


@dataclass(frozen=True)
class Denjoy:
    """A point of the blown-up rotation.

    ``side`` is ``"minus"`` or ``"plus"`` exactly when ``pos`` is the marked
    orbit point ``index * alpha mod 1``; otherwise both are None.
    """

    pos: Any
    side: str | None = None
    index: int | None = None


@dataclass(frozen=True)
class Finite:
    index: int
    cardinality: int


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if n == 0:
            raise ValueError("zero quaternion")
        if n != 1.0:
            for name in ("w", "x", "y", "z"):
                object.__setattr__(self, name, getattr(self, name) / n)

    def __mul__(self, o: Quaternion) -> Quaternion:
        return Quaternion(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)


@dataclass(frozen=True)
class Product:
    left: Any
    right: Any


@dataclass(frozen=True)
class KleinClass:
    """Class of (g, z) under (g, z) ~ (g + 1/2, -z); ``rep`` has g in [0, 1/2)."""

    rep: Torus


def is_symbolic_point(p) -> bool:
    """True when every coordinate of ``p`` is exact (so exact steps stay exact)."""
    from ..angles import is_exact

    if isinstance(p, (CantorWord, Finite)):
        return True
    if isinstance(p, Quaternion):
        return False
    if isinstance(p, Circle):
        return is_exact(p.s)
    if isinstance(p, Torus):
        return all(is_exact(c) for c in p.coords)
    if isinstance(p, Denjoy):
        return is_exact(p.pos)
    if isinstance(p, Solenoid):
        return is_exact(p.height)
    if isinstance(p, Product):
        return is_symbolic_point(p.left) and is_symbolic_point(p.right)
    if isinstance(p, KleinClass):
        return is_symbolic_point(p.rep)
    return is_exact(p)


def point_to_json(p) -> Any:
    from ..report import jsonable

    if is_dataclass(p):
        out = {"type": type(p).__name__}
        for f in fields(p):
            out[f.name] = point_to_json(getattr(p, f.name))
        return out
    if isinstance(p, tuple):
        return [point_to_json(v) for v in p]
    return jsonable(p)
