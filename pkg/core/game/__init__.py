"""
Finite-sum games: objects, component oracles, benchmarks and constants
"""

from .spec import (
    ActionProfile,
    Box,
    EdgeComponentParams,
    EdgeParamTable,
    EstimateMatrix,
    EVComponentParams,
    EVParamTable,
    GameKind,
    GameSpec,
    project,
)
from .costs import (
    bregman_divergence,
    component_cost,
    component_grad,
    component_grad_table,
    component_grads,
    component_curvature,
    full_pseudo_gradient,
    local_component_grads,
    pseudo_jacobian,
)
from .benchmarks import EdgeRanges, EVRanges, make_edge_game, make_ev_game
from .constants import GameConstants, game_constants, monotonicity_constants
from .tables import load_game_tables, write_game_tables

__all__ = [
    "ActionProfile",
    "Box",
    "EdgeComponentParams",
    "EdgeParamTable",
    "EstimateMatrix",
    "EVComponentParams",
    "EVParamTable",
    "GameKind",
    "GameSpec",
    "project",
    "bregman_divergence",
    "component_cost",
    "component_grad",
    "component_grad_table",
    "component_grads",
    "component_curvature",
    "full_pseudo_gradient",
    "local_component_grads",
    "pseudo_jacobian",
    "EdgeRanges",
    "EVRanges",
    "make_edge_game",
    "make_ev_game",
    "GameConstants",
    "game_constants",
    "monotonicity_constants",
    "load_game_tables",
    "write_game_tables",
]
