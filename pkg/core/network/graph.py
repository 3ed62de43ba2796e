"""
Communication graphs

Graphs are undirected, simple and connected. The adjacency matrix is the
exchange format between this module and the rest of the library.
"""

from enum import Enum
from typing import Optional
import logging

import networkx as nx
import numpy as np

from ..errors import GraphError

logger = logging.getLogger(__name__)

MAX_RETRIES = 200


class GraphKind(str, Enum):
    """Graph family"""
    RING = "ring"
    COMPLETE = "complete"
    RANDOM = "random"    # Erdős–Rényi G(n, p), resampled until connected


def _to_adjacency(graph: nx.Graph, n: int) -> np.ndarray:
    return nx.to_numpy_array(graph, nodelist=range(n), dtype=np.float64)


def build_graph(
    kind: GraphKind | str,
    n: int,
    seed: int = 0,
    p: Optional[float] = None,
    max_retries: int = MAX_RETRIES,
) -> np.ndarray:
    """
    Build a connected communication graph

    Args:
        kind: ring, complete or random
        n: node count (>= 2)
        seed: seed for random graphs
        p: edge probability for random graphs, 0 < p <= 1
        max_retries: resampling budget for random graphs

    Returns:
        np.ndarray: symmetric zero-diagonal 0/1 adjacency matrix

    Raises:
        GraphError: bad arguments, or no connected sample within the budget
    """
    kind = GraphKind(kind)
    if n < 2:
        raise GraphError(f"graph needs at least 2 nodes, got {n}")

    if kind is GraphKind.RING:
        return _to_adjacency(nx.cycle_graph(n), n)
    if kind is GraphKind.COMPLETE:
        return _to_adjacency(nx.complete_graph(n), n)

    if p is None or not 0.0 < p <= 1.0:
        raise GraphError(f"random graph needs 0 < p <= 1, got {p}")
    rng = np.random.default_rng(seed)
    for attempt in range(max_retries):
        graph = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**32)))
        if nx.is_connected(graph):
            logger.debug(f"Random graph n={n} p={p} connected after {attempt + 1} draws")
            return _to_adjacency(graph, n)
    raise GraphError(f"no connected G({n}, {p}) sample within {max_retries} draws")


def validate_adjacency(adjacency: np.ndarray) -> nx.Graph:
    """Check that adjacency describes a connected simple undirected graph"""
    adjacency = np.asarray(adjacency, dtype=np.float64)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise GraphError(f"adjacency must be square, got shape {adjacency.shape}")
    if adjacency.shape[0] < 2:
        raise GraphError("graph needs at least 2 nodes")
    if not np.array_equal(adjacency, adjacency.T):
        raise GraphError("adjacency must be symmetric")
    if np.any(np.diag(adjacency) != 0.0):
        raise GraphError("adjacency must have a zero diagonal")
    if not np.all(np.isin(adjacency, (0.0, 1.0))):
        raise GraphError("adjacency entries must be 0 or 1")
    graph = nx.from_numpy_array(adjacency)
    if not nx.is_connected(graph):
        raise GraphError("graph is not connected")
    return graph
