"""Named experiments, JSON configs and the command line."""

from .catalog import BATTERY, DEPENDENT_CASES, GALLERY, INDEPENDENT_CASES, builder_pairs, gallery
from .config import BUILDERS, Analysis, ConfigError, Experiment, evaluate, load_config, validate
from .ops import ANALYSES
from .runner import RunReport, blob_hash, list_gallery, merge_reports, run_experiment

__all__ = [
    "ANALYSES", "Analysis", "BATTERY", "BUILDERS", "ConfigError", "DEPENDENT_CASES", "Experiment", "GALLERY",
    "INDEPENDENT_CASES", "RunReport", "blob_hash", "builder_pairs", "evaluate", "gallery", "list_gallery",
    "load_config", "merge_reports", "run_experiment", "validate",
]
