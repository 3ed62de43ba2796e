"""
Run metrics
"""

import numpy as np
import numpy.typing as npt

from ..errors import MetricError

ERROR_FLOOR = -16.0


def error_metric(x: npt.ArrayLike, x0: npt.ArrayLike, x_star: npt.ArrayLike) -> float:
    """
    e = log10(‖x - x⋆‖ / ‖x0 - x⋆‖), floored at -16

    Raises:
        MetricError: x0 == x_star
    """
    x_star = np.asarray(x_star, dtype=np.float64)
    scale = float(np.linalg.norm(np.asarray(x0, dtype=np.float64) - x_star))
    if scale == 0.0:
        raise MetricError("x0 equals x_star; error normalization is undefined")
    dist = float(np.linalg.norm(np.asarray(x, dtype=np.float64) - x_star))
    if dist == 0.0:
        return ERROR_FLOOR
    return max(float(np.log10(dist / scale)), ERROR_FLOOR)


def disagreement_norm(y: npt.ArrayLike, x: npt.ArrayLike) -> float:
    """‖y - 1ₙ⊗x‖² with y stored as the (n, n) estimate matrix"""
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum((y - x[None, :]) ** 2))
