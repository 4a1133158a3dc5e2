"""Verdicts: exact certificates, density and transitivity scans, Weyl sums, recurrence."""

from .certificates import (
    FactorNotMinimal,
    certificate_scan_coherence,
    component_swap_certificate,
    invariant_function_witness,
    s3_subgroup_deviation,
    suspension_group_law,
    td_ab_system,
    torus_product_certificate,
    two_circles_certificate,
)
from .density import cover, exact_period, find_obstruction, minimality_scan, scan_starts
from .recurrence import exact_distance, periodic_recurrence_check
from .reports import DensityReport, HittingSet
from .transitivity import fiber_transitivity_check, hitting_sets, net_pairs, syndetic_gaps, transitivity_scan
from .weyl import geometric_bound, weyl_ratio, weyl_test

__all__ = [
    "DensityReport", "FactorNotMinimal", "certificate_scan_coherence", "HittingSet", "component_swap_certificate", "cover", "exact_distance",
    "exact_period", "fiber_transitivity_check", "find_obstruction", "geometric_bound", "hitting_sets",
    "invariant_function_witness", "minimality_scan", "net_pairs", "periodic_recurrence_check",
    "s3_subgroup_deviation", "scan_starts", "suspension_group_law", "syndetic_gaps", "td_ab_system", "torus_product_certificate",
    "transitivity_scan", "two_circles_certificate", "weyl_ratio", "weyl_test",
]
