"""
Component sampling, random streams and step-size schedules
"""

from .streams import RUN_SLOT, StreamFactory, StreamPurpose
from .permutations import (
    EpochSampler,
    Permutation,
    SamplingMode,
    draw_with_replacement,
    fresh_permutation,
    is_permutation,
)
from .schedule import (
    Schedule,
    ScheduleBinding,
    ScheduleKind,
    schedule_arrays,
    schedule_value,
)
from .conditions import (
    ConditionEntry,
    ConditionReport,
    alpha_bar,
    check_conditions,
    consensus_bar,
    horizon_tuned_step,
    constant_schedule_for,
    diminishing_schedule_for,
)

__all__ = [
    "RUN_SLOT",
    "StreamFactory",
    "StreamPurpose",
    "EpochSampler",
    "Permutation",
    "SamplingMode",
    "draw_with_replacement",
    "fresh_permutation",
    "is_permutation",
    "Schedule",
    "ScheduleBinding",
    "ScheduleKind",
    "schedule_arrays",
    "schedule_value",
    "ConditionEntry",
    "ConditionReport",
    "alpha_bar",
    "check_conditions",
    "consensus_bar",
    "horizon_tuned_step",
    "constant_schedule_for",
    "diminishing_schedule_for",
]
