"""Monte Carlo harness: plans, estimators, studies and reports."""

from experiments.estimators import MOEEstimate, MOpNEstimate, estimate_moe, estimate_mopn, top_eigenpair
from experiments.plan import ExperimentPlan, dump_plan, load_plan, parse_plan
from experiments.report import ROW_COLUMNS, Report, build_report, emit, read_report
from experiments.runner import run_ordered
from experiments.shape import ShapeResult, validate_optimal_shape
from experiments.studies import (
    bell_pair_experiment,
    bell_pair_records,
    convergence_study,
    flavor_differences,
    moe_experiment,
    moe_records,
    moment_cross_check,
    probe_set,
    study_report,
    summarize,
)

__all__ = [
    "ExperimentPlan",
    "MOEEstimate",
    "MOpNEstimate",
    "ROW_COLUMNS",
    "Report",
    "ShapeResult",
    "bell_pair_experiment",
    "bell_pair_records",
    "build_report",
    "convergence_study",
    "dump_plan",
    "emit",
    "estimate_moe",
    "estimate_mopn",
    "flavor_differences",
    "load_plan",
    "moe_experiment",
    "moe_records",
    "moment_cross_check",
    "parse_plan",
    "probe_set",
    "read_report",
    "run_ordered",
    "study_report",
    "summarize",
    "top_eigenpair",
    "validate_optimal_shape",
]
