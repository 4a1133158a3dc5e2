"""Experiment configs: a JSON document {registry, experiments} with nested-array builder expressions.

An expression is a JSON array whose first element names a builder, e.g.
``["skew_product", ["circle_rotation", "sqrt2"], ["anzai_cocycle"]]``.  Strings
in value positions are exact reals (``"1/2 + sqrt2"``); other arrays are lists.
"""

from __future__ import annotations

import inspect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .. import cocycles as coc
from .. import dynsys as ds
from ..analysis import td_ab_system
from ..combinators import direct_product, klein_quotient, skew_product
from ..symreal import CATALOG, DEFAULT_REGISTRY, SymReal, parse_sym, sym

EXPECTED = ("pass", "fail", "inconclusive", "minimal", "nonminimal")


class ConfigError(ValueError):
    """Malformed config or builder expression."""


def _denjoy(alpha, c="1/2", window=200):
    S, fm = ds.denjoy_system(alpha, Fraction(str(c)) if not isinstance(c, SymReal) else c.rat, int(window))
    S.params["factor_map"] = fm
    return S


def _int(v) -> int:
    if isinstance(v, SymReal):
        if not (v.is_rational and v.rat.denominator == 1):
            raise ConfigError(f"expected an integer, got {v}")
        return int(v.rat)
    return int(v)


def _real(v):
    return v if isinstance(v, SymReal) else sym(Fraction(str(v)) if isinstance(v, float) else v)


BUILDERS: dict[str, Callable] = {
    # systems
    "circle_rotation": lambda alpha: ds.circle_rotation(_real(alpha)),
    "torus_rotation": lambda alphas: ds.torus_rotation([_real(a) for a in alphas]),
    "identity_circle": lambda: ds.circle_rotation(0).with_name("identity"),
    "odometer": lambda b=2, depth=20: ds.odometer(_int(b), _int(depth)),
    "cyclic": lambda k: ds.cyclic_system(_int(k)),
    "s3_circle": lambda turns: ds.s3_translation(ds.circle_subgroup_element(_real(turns)), _real(turns)),
    "denjoy": _denjoy,
    "two_circles_base": lambda alpha: ds.two_circles_base(_real(alpha)),
    "two_circles_skew": lambda alpha, beta: ds.two_circles_skew(_real(alpha), _real(beta)),
    "suspension": lambda h, t: ds.suspension_time_t(h, _real(t)),
    "td_ab": lambda a, b, t0: td_ab_system(_int(a), _int(b), _real(t0)),
    "direct_product": direct_product,
    "skew_product": lambda base, f: skew_product(base, f),
    "klein_quotient": lambda P: klein_quotient(P),
    # flows
    "linear_flow": lambda direction: ds.LinearFlow([_real(d) for d in direction]),
    "suspension_flow": lambda h: ds.SuspensionFlow(h),
    # cocycles
    "zero_cocycle": lambda dim=1: coc.zero_cocycle(_int(dim)),
    "const_cocycle": lambda c: coc.const_cocycle([_real(v) for v in c] if isinstance(c, list) else _real(c)),
    "linear_cocycle": lambda m: coc.linear_cocycle(_int(m)),
    "anzai_cocycle": coc.anzai_cocycle,
    "sine_cocycle": lambda kappa, offset="1/2": coc.sine_cocycle(_real(kappa).rat, _real(offset).rat),
    # points and balls
    "circle": lambda s: ds.Circle(_real(s)),
    "torus": lambda coords: ds.Torus(tuple(_real(c) for c in coords)),
    "finite": lambda i, k: ds.Finite(_int(i), _int(k)),
    "word": lambda n, b, depth: ds.CantorWord.from_int(_int(n), _int(b), _int(depth)),
    "pair": lambda a, b: ds.Product(a, b),
    "group": lambda coords: tuple(_real(c) for c in coords),
    "ball": lambda center, radius: ds.Ball(center, float(radius.rat) if isinstance(radius, SymReal) else float(radius)),
}


def is_expression(x) -> bool:
    return isinstance(x, list) and bool(x) and isinstance(x[0], str) and x[0] in BUILDERS


def validate(expr, path: str = "builder") -> None:
    """Check operator names and arities without building anything."""
    if isinstance(expr, list):
        if expr and isinstance(expr[0], str) and expr[0] not in BUILDERS:
            try:
                parse_sym(expr[0])
            except ValueError:
                raise ConfigError(f"{path}: unknown builder {expr[0]!r}") from None
        if is_expression(expr):
            try:
                inspect.signature(BUILDERS[expr[0]]).bind(*expr[1:])
            except TypeError as e:
                raise ConfigError(f"{path}: bad arguments for {expr[0]!r}: {e}") from None
            args = expr[1:]
        else:
            args = expr
        for i, a in enumerate(args):
            validate(a, f"{path}[{i}]")
    elif isinstance(expr, str):
        try:
            parse_sym(expr)
        except ValueError as e:
            raise ConfigError(f"{path}: {e}") from None
    elif isinstance(expr, dict):
        raise ConfigError(f"{path}: objects are not expressions")


def evaluate(expr) -> Any:
    """Build the value an expression denotes."""
    if is_expression(expr):
        return BUILDERS[expr[0]](*(evaluate(a) for a in expr[1:]))
    if isinstance(expr, list):
        return [evaluate(a) for a in expr]
    if isinstance(expr, str):
        return parse_sym(expr)
    return expr


def declare_registry(names) -> None:
    for name in names:
        if name not in CATALOG:
            raise ConfigError(f"unknown registry constant {name!r}")
        DEFAULT_REGISTRY.declare(name)


@dataclass
class Analysis:
    op: str
    params: dict = field(default_factory=dict)
    expect: str = "pass"

    def to_json(self) -> dict:
        return {"op": self.op, "params": self.params, "expect": self.expect}


@dataclass
class Experiment:
    """A named builder expression and an ordered analysis plan with expected verdicts."""

    name: str
    builder: Any
    plan: list[Analysis]
    seed: int = 0
    claim: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "claim": self.claim, "builder": self.builder, "seed": self.seed,
                "plan": [a.to_json() for a in self.plan]}

    @classmethod
    def from_json(cls, d: dict) -> Experiment:
        try:
            name = d["name"]
            plan = [Analysis(a["op"], dict(a.get("params", {})), a.get("expect", "pass")) for a in d["plan"]]
        except (KeyError, TypeError) as e:
            raise ConfigError(f"experiment is missing a field: {e}") from None
        e = cls(name, d.get("builder"), plan, int(d.get("seed", 0)), d.get("claim", ""))
        e.validate()
        return e

    def validate(self) -> None:
        from .ops import ANALYSES

        if not isinstance(self.name, str) or not self.name:
            raise ConfigError("experiment needs a name")
        if self.builder is not None:
            if isinstance(self.builder, list) and self.builder and isinstance(self.builder[0], str):
                validate(self.builder, f"{self.name}.builder")
            if not is_expression(self.builder):
                raise ConfigError(f"{self.name}: builder must be a builder expression")
            validate(self.builder, f"{self.name}.builder")
        if not self.plan:
            raise ConfigError(f"{self.name}: empty analysis plan")
        for i, a in enumerate(self.plan):
            if a.op not in ANALYSES:
                raise ConfigError(f"{self.name}.plan[{i}]: unknown analysis {a.op!r}")
            if a.expect not in EXPECTED:
                raise ConfigError(f"{self.name}.plan[{i}]: expected verdict {a.expect!r} not in {EXPECTED}")


def load_config(doc: dict) -> list[Experiment]:
    """Parse ``{"registry": [...], "experiments": [...]}``."""
    if not isinstance(doc, dict) or "experiments" not in doc:
        raise ConfigError("config must be an object with an 'experiments' list")
    declare_registry(doc.get("registry", []))
    exps = [Experiment.from_json(e) for e in doc["experiments"]]
    names = [e.name for e in exps]
    if len(set(names)) != len(names):
        raise ConfigError("experiment names must be unique")
    return exps
