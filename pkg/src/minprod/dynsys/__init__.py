"""Phase spaces, point types and concrete systems."""

from .constructors import (
    LinearFlow,
    SuspensionFlow,
    circle_rotation,
    circle_subgroup_element,
    cyclic_system,
    odometer,
    s3_translation,
    suspension_time_t,
    torus_rotation,
    two_circles_base,
    two_circles_skew,
)
from .denjoy import DenjoySpace, FactorMap, WindowOverflow, denjoy_system
from .points import CantorWord, Circle, Denjoy, Finite, KleinClass, Product, Quaternion, Solenoid, Torus, is_symbolic_point, point_to_json
from .spaces import (
    CantorSpace,
    CircleSpace,
    FiniteSpace,
    KleinSpace,
    Net,
    ProductSpace,
    SolenoidSpace,
    Space,
    SphereSpace,
    TorusSpace,
    klein_canonical,
    klein_canonical_array,
)
from .system import Ball, Obstruction, System, combine_periods

__all__ = [
    "Ball", "CantorSpace", "CantorWord", "Circle", "CircleSpace", "Denjoy", "DenjoySpace", "FactorMap", "Finite",
    "FiniteSpace", "KleinClass", "KleinSpace", "LinearFlow", "Net", "Obstruction", "Product", "ProductSpace",
    "Quaternion", "Solenoid", "SolenoidSpace", "Space", "SphereSpace", "SuspensionFlow", "System", "Torus",
    "TorusSpace", "WindowOverflow", "circle_rotation", "circle_subgroup_element", "combine_periods",
    "cyclic_system", "denjoy_system", "is_symbolic_point", "klein_canonical", "klein_canonical_array", "odometer", "point_to_json",
    "s3_translation", "suspension_time_t", "torus_rotation", "two_circles_base", "two_circles_skew",
]
