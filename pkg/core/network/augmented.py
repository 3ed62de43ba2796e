"""
Augmented estimate matrix H and its spectral bounds

The stacked estimate vector is row-major: position i*n + j holds player i's
estimate of player j. H = kron(Laplacian, I_n) + diag(a.flatten()), so the
pinning entry for (i, j) is a_ij: player i hears x_j directly only from a
neighbor j.
"""

from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np
import numpy.typing as npt
from scipy import linalg

from ..errors import SpectralError
from .mixing import NetworkSpec

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AugmentedMatrix:
    """H with its extreme eigenvalues"""
    H: np.ndarray
    lambda_min: float
    lambda_max: float

    @property
    def size(self) -> int:
        return int(self.H.shape[0])

    def contraction(self, w: float) -> float:
        """1 - (w λmin - w² λmax), the per-step consensus factor"""
        return contraction_factor(w, self.lambda_min, self.lambda_max)

    def max_consensus_step(self) -> float:
        """λmin / (2 λmax)"""
        return self.lambda_min / (2.0 * self.lambda_max)


def contraction_factor(w: float, lambda_min: float, lambda_max: float) -> float:
    return 1.0 - (w * lambda_min - w * w * lambda_max)


def spectral_bounds(matrix: npt.ArrayLike) -> Tuple[float, float]:
    """
    Extreme eigenvalues of a symmetric matrix

    Raises:
        SpectralError: matrix is not square and symmetric
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 1.0)
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOL * scale):
        raise SpectralError("spectral bounds require a symmetric matrix")
    eigenvalues = linalg.eigvalsh(matrix)
    return float(eigenvalues[0]), float(eigenvalues[-1])


def laplacian(weights: np.ndarray) -> np.ndarray:
    """diag(row sums of a) - a"""
    return np.diag(weights.sum(axis=1)) - weights


def build_H(network: NetworkSpec) -> AugmentedMatrix:
    """
    Assemble H = kron(L, I_n) + Δ with Δ = diag(a_11, a_12, ..., a_nn)

    Args:
        network: communication network

    Returns:
        AugmentedMatrix: n² x n² matrix and its λmin, λmax
    """
    a = network.weights
    n = network.n
    H = np.kron(laplacian(a), np.eye(n)) + np.diag(a.reshape(-1))
    lambda_min, lambda_max = spectral_bounds(H)
    H.setflags(write=False)
    logger.info(f"Augmented matrix n={n}: lambda_min={lambda_min:.6g} lambda_max={lambda_max:.6g}")
    return AugmentedMatrix(H=H, lambda_min=lambda_min, lambda_max=lambda_max)
