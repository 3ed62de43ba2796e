"""
Full and partial decision information dynamics
"""

from .trace import InfoMode, RunTrace, TRACE_COLUMNS, arm_name, read_trace_frame
from .solvers import (
    check_gate,
    full_info_step,
    initial_estimates,
    initial_point,
    partial_info_step,
    prepare_schedule,
    run_full_info,
    run_partial_info,
)

__all__ = [
    "InfoMode",
    "RunTrace",
    "TRACE_COLUMNS",
    "arm_name",
    "read_trace_frame",
    "check_gate",
    "full_info_step",
    "initial_estimates",
    "initial_point",
    "partial_info_step",
    "prepare_schedule",
    "run_full_info",
    "run_partial_info",
]
