"""
Equilibrium oracles, reference trajectories, shuffling variance and bounds
"""

from .metrics import ERROR_FLOOR, disagreement_norm, error_metric
from .oracles import (
    NEMethod,
    NESolution,
    affine_system,
    solve_ne,
    solve_ne_affine,
    solve_ne_fixed_point,
)
from .reference import (
    ReferenceTrajectory,
    ShuffleVarianceEstimate,
    reference_trajectory,
    shuffling_variance_mc,
)
from .bounds import TheoryBounds, shuffle_variance_bound, theory_bounds

__all__ = [
    "ERROR_FLOOR",
    "disagreement_norm",
    "error_metric",
    "NEMethod",
    "NESolution",
    "affine_system",
    "solve_ne",
    "solve_ne_affine",
    "solve_ne_fixed_point",
    "ReferenceTrajectory",
    "ShuffleVarianceEstimate",
    "reference_trajectory",
    "shuffling_variance_mc",
    "TheoryBounds",
    "shuffle_variance_bound",
    "theory_bounds",
]
