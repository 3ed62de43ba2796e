"""
Experiment configuration, orchestration, aggregation and the run manifest
"""

from .config import ExperimentConfig, dump_config, load_config, parse_config_text
from .manifest import ManifestEntry, RunManifest
from .executor import RunExecutor, RunJob, execute_job
from .aggregate import AggregateStats, aggregate, write_csv
from .experiment import (
    ExperimentSetup,
    build_game,
    build_jobs,
    check_experiment,
    evaluate_bounds,
    prepare,
    resolve_schedule,
    run_experiment,
    solve_ne_for_config,
    variance_study,
)

__all__ = [
    "ExperimentConfig",
    "dump_config",
    "load_config",
    "parse_config_text",
    "ManifestEntry",
    "RunManifest",
    "RunExecutor",
    "RunJob",
    "execute_job",
    "AggregateStats",
    "aggregate",
    "write_csv",
    "ExperimentSetup",
    "build_game",
    "build_jobs",
    "check_experiment",
    "evaluate_bounds",
    "prepare",
    "resolve_schedule",
    "run_experiment",
    "solve_ne_for_config",
    "variance_study",
]
