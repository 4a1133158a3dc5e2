"""Built-in gallery: named experiments with expected verdicts."""

from __future__ import annotations

from .config import Analysis, Experiment

# (x, g) torus-rotation product cases: ten with 1, x, g independent, ten with a planted relation
INDEPENDENT_CASES = [
    (["sqrt2"], ["sqrt3"]),
    (["sqrt2"], ["sqrt5"]),
    (["sqrt3"], ["sqrt5"]),
    (["sqrt2"], ["pi"]),
    (["sqrt2 + 1/3"], ["sqrt3 - 1/5"]),
    (["sqrt2"], ["sqrt2 + sqrt3"]),
    (["sqrt2", "sqrt3"], ["sqrt5"]),
    (["1/2 + sqrt5"], ["sqrt2/3"]),
    (["sqrt3"], ["2*sqrt2 + sqrt3"]),
    (["sqrt2", "sqrt5"], ["sqrt3 + 1/7"]),
]
DEPENDENT_CASES = [
    (["sqrt2"], ["sqrt2"]),
    (["sqrt2"], ["2*sqrt2 + 1/2"]),
    (["sqrt3"], ["sqrt3/3"]),
    (["sqrt2 + 1/4"], ["sqrt2"]),
    (["sqrt2"], ["sqrt2/2 + 1/4"]),
    (["sqrt2", "sqrt3"], ["sqrt2 + sqrt3"]),
    (["sqrt5"], ["3 - sqrt5"]),
    (["sqrt2", "sqrt3"], ["sqrt2 - sqrt3 + 1/5"]),
    (["sqrt2 + sqrt3"], ["2*sqrt2 + 2*sqrt3 + 1/3"]),
    (["golden"], ["sqrt5"]),
]
BATTERY = [list(c) for c in INDEPENDENT_CASES + DEPENDENT_CASES]


def builder_pairs() -> list:
    """Eight window/target pairs over the circle: U_i around (2i+1)/16, V_i around (3i mod 8)/8 + 1/16."""
    return [[["ball", ["circle", f"{2 * i + 1}/16"], 0.1],
             ["ball", ["group", [f"{(3 * i) % 8}/8 + 1/16"]], 0.1]] for i in range(8)]


def _a(op: str, expect: str = "pass", **params) -> Analysis:
    return Analysis(op, params, expect)


SQRT2 = ["circle_rotation", "sqrt2"]

GALLERY: list[Experiment] = [
    Experiment("rational-rotation-period", ["circle_rotation", "1/5"], [
        _a("minimality_scan", "fail", eps=0.02, horizon=10**6, samples=16),
    ], claim="a rational rotation has finite orbits, so its scan fails with the exact orbit"),
    Experiment("irrational-rotation-density", SQRT2, [
        _a("minimality_scan", eps=0.02, horizon=10**5, samples=8),
        _a("torus_product_certificate", "minimal", x=["sqrt2"], g=["sqrt3"]),
    ], claim="an irrational rotation has dense orbits"),
    Experiment("weyl-equidistribution", SQRT2, [
        _a("weyl_test", alpha="sqrt2", indices="n", K=5, n=10**5),
        _a("weyl_test", alpha="sqrt2", indices="n^2", K=5, n=10**5),
        _a("weyl_test", "fail", alpha="1/2", indices="n", K=5, n=10**5),
        _a("minimality_scan", eps=0.4, horizon=10**4, samples=4),
    ], claim="n*alpha is equidistributed for irrational alpha, and small Weyl sums imply density"),
    Experiment("torus-cert-battery", None, [
        _a("certificate_scan_coherence", cases=BATTERY, eps=0.02, horizon=10**6, samples=4),
    ], claim="exact rotation certificates agree with density scans on twenty cases"),
    Experiment("product-with-generic-rotation", None, [
        _a("generic_rotation_frequency", x=["sqrt2"], count=50, scan_check=8, eps=0.05, horizon=10**5),
    ], claim="a rotation times a generic circle rotation is minimal (sampled frequency)"),
    Experiment("periodic-recurrence-product", ["direct_product", ["odometer", 2, 10], SQRT2], [
        _a("periodic_recurrence_check", factor="left", depth=10),
        _a("minimality_scan", eps=0.05, horizon=10**6, samples=4),
    ], claim="an odometer is periodically recurrent, and its product with an irrational rotation is minimal"),
    Experiment("fiber-transitivity", ["skew_product", SQRT2, ["anzai_cocycle"]], [
        _a("fiber_transitivity_check", eps=0.05, horizon=10**6),
        _a("transitivity_scan", eps=0.1, horizon=10_000),
    ], claim="every point of a fiber over a base point is transitive for the Anzai skew product"),
    Experiment("cocycle-builder-transitive", SQRT2, [
        _a("cocycle_builder", pairs=builder_pairs(), budget=64, fiber_eps=0.1),
    ], claim="a greedy perturbation builder reaches every window/target pair and the skew product is fiber transitive"),
    Experiment("klein-minimal",
               ["klein_quotient", ["skew_product", SQRT2, ["sine_cocycle", 256]]], [
        _a("check_equivariance"),
        _a("invariant_check", cocycle=["sine_cocycle", "3/10"]),
        _a("minimality_scan", eps=0.05, horizon=10**6, samples=4),
    ], claim="a skew product commuting with the flip descends to the Klein bottle with eps-dense quotient orbits at the scanned resolution"),
    Experiment("denjoy-almost-1-1", ["denjoy", "sqrt2"], [
        _a("verify_factor", samples=16, horizon=100),
        _a("minimality_scan", eps=0.02, horizon=10**6, samples=4),
    ], claim="the Denjoy system is a minimal Cantor extension of the rotation, one to one off one orbit"),
    Experiment("scurve-geometry", None, [
        _a("scurve_check", alpha2=["sqrt2", "sqrt3"], r0="1/100", window=200, mesh=0.1, density_tol=0.1),
    ], claim="disjoint closed round discs along a dense rotation orbit, radii shrinking geometrically"),
    Experiment("suspension-time-t", ["suspension_flow", ["odometer", 2, 10]], [
        _a("suspension_group_law", samples=200),
        _a("suspension_time_sample", times=["1/2", "1/3", "sqrt2 - 1", "sqrt3/4"], eps=0.05,
           horizon=10**5, samples=2),
    ], claim="the suspension flow obeys the group law; rational time-t maps are periodic, irrational ones dense"),
    Experiment("td-ab-nonminimal", ["td_ab", 2, 3, "sqrt2"], [
        _a("invariant_function_witness", a=2, b=3, t0="sqrt2", iterates=200, points=200),
        _a("minimality_scan", "fail", eps=0.05, horizon=10**5, samples=4),
    ], claim="the affine torus map has the invariant b*s - a*s' and is not minimal"),
    Experiment("two-circles-skew", ["two_circles_skew", "sqrt2", "sqrt3"], [
        _a("two_circles_certificate"),
        _a("transitivity_scan", eps=0.25, horizon=10_000),
        _a("component_swap_certificate", A=["two_circles_base", "sqrt2"], B=["two_circles_base", "sqrt3"]),
    ], claim="the skew map permutes four circles in a 4-cycle and is transitive; direct products are not"),
    Experiment("s3-translation-nonminimal", ["s3_circle", "sqrt2 - 1"], [
        _a("s3_subgroup_deviation", n=10**5),
        _a("minimality_scan", "fail", eps=0.5, horizon=10**5, samples=4),
    ], claim="a translation of the 3-sphere stays on a circle subgroup and is not minimal"),
    Experiment("flow-centralizer-time-t", ["linear_flow", ["sqrt2", "sqrt3"]], [
        _a("flow_time_t_sample", times=["1", "1/2", "1/3", "2/3", "3/4", "5/7", "7/5", "11/13"],
           scan_check=3, eps=0.05, horizon=10**5),
        _a("syndetic_gaps", V=["ball", ["torus", ["0", "0"]], 0.1], V2=["ball", ["torus", ["1/2", "1/2"]], 0.1],
           t_max=200, dt="1/10"),
    ], claim="time-t maps of an irrational linear flow are minimal at sampled t, with syndetic return times"),
]


def gallery() -> dict[str, Experiment]:
    return {e.name: e for e in GALLERY}
