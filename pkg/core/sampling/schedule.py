"""
Step-size schedules

A schedule yields (α_k, w_k) per epoch. Constant schedules repeat (alpha0, w0).
Diminishing schedules use α_k = alpha0/(k+1) and w_k = w0/√(k+1); once bound
to L, λmin{H} and m, w_k is clamped into the open interval
(8L/λmin · α_k, 1/(2mλmin)) with a 1e-3 relative margin on both sides.
"""

from enum import Enum
from typing import Optional, Tuple
import hashlib
import json
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ScheduleError

logger = logging.getLogger(__name__)

CLAMP_MARGIN = 1e-3


class ScheduleKind(str, Enum):
    CONSTANT = "constant"
    DIMINISHING = "diminishing"


class ScheduleBinding(BaseModel):
    """Game and network constants a diminishing schedule is clamped against"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    lip: float = Field(gt=0)
    lambda_min: float = Field(gt=0)
    m: int = Field(ge=1)

    def sandwich(self, alpha: float) -> Tuple[float, float]:
        """(lower, upper) clamp for w at step size alpha, margins applied"""
        lower = 8.0 * self.lip / self.lambda_min * alpha * (1.0 + CLAMP_MARGIN)
        upper = 1.0 / (2.0 * self.m * self.lambda_min) * (1.0 - CLAMP_MARGIN)
        return lower, upper


class Schedule(BaseModel):
    """
    Step-size schedule for K epochs

    w0 = 0 is accepted for full-information runs, which never read w;
    partial-information runs reject it.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: ScheduleKind
    alpha0: float = Field(ge=0)
    w0: float = Field(ge=0)
    horizon: int = Field(default=1000, ge=1)
    bind: Optional[ScheduleBinding] = None

    def bound(self, lip: float, lambda_min: float, m: int) -> "Schedule":
        """Copy of this schedule clamped against the given constants"""
        schedule = self.model_copy(update={"bind": ScheduleBinding(lip=lip, lambda_min=lambda_min, m=m)})
        if schedule.kind is ScheduleKind.DIMINISHING:
            schedule_value(schedule, 0)
        return schedule

    def describe(self) -> str:
        text = f"{self.kind.value} alpha0={self.alpha0:.6g} w0={self.w0:.6g} K={self.horizon}"
        if self.bind is not None and self.kind is ScheduleKind.DIMINISHING:
            text += " (clamped)"
        return text

    def content_hash(self) -> str:
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


def schedule_value(s: Schedule, k: int) -> Tuple[float, float]:
    """
    (α_k, w_k) for epoch k

    Args:
        s: schedule
        k: epoch index (>= 0)

    Returns:
        tuple: (alpha_k, w_k)

    Raises:
        ScheduleError: the clamp interval is empty at k = 0
    """
    if k < 0:
        raise ValueError(f"epoch index must be >= 0, got {k}")
    if s.kind is ScheduleKind.CONSTANT:
        return s.alpha0, s.w0

    alpha = s.alpha0 / (k + 1)
    w = s.w0 / math.sqrt(k + 1)
    if s.bind is None:
        return alpha, w

    lower, upper = s.bind.sandwich(alpha)
    if lower >= upper:
        lower0, _ = s.bind.sandwich(s.alpha0)
        raise ScheduleError(
            "infeasible diminishing schedule: 8L/lambda_min * alpha_0 "
            f"= {lower0:.6g} >= 1/(2 m lambda_min) = {upper:.6g}"
        )
    return alpha, min(max(w, lower), upper)


def schedule_arrays(s: Schedule, K: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """α_k and w_k for k = 0..K-1"""
    K = s.horizon if K is None else K
    values = [schedule_value(s, k) for k in range(K)]
    alpha = np.array([v[0] for v in values])
    w = np.array([v[1] for v in values])
    return alpha, w
