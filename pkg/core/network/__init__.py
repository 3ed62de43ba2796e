"""
Communication networks, mixing matrices and the augmented estimate matrix
"""

from .graph import GraphKind, build_graph, validate_adjacency
from .mixing import NetworkSpec, make_network, metropolis_weights, write_network_tables
from .augmented import (
    AugmentedMatrix,
    build_H,
    contraction_factor,
    laplacian,
    spectral_bounds,
)

__all__ = [
    "GraphKind",
    "build_graph",
    "validate_adjacency",
    "NetworkSpec",
    "make_network",
    "metropolis_weights",
    "write_network_tables",
    "AugmentedMatrix",
    "build_H",
    "contraction_factor",
    "laplacian",
    "spectral_bounds",
]
