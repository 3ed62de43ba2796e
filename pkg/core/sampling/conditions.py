"""
Step-size condition checks

Each condition becomes one ConditionEntry; a report passes iff every entry is
satisfied. Informational values (ᾱ, the horizon-tuned α_K, contraction
factors) travel in the report's notes and never affect the verdict.
"""

from dataclasses import dataclass, field
from typing import Optional
import logging
import math

import numpy as np

from ..errors import ScheduleError
from ..game.constants import GameConstants
from ..network.augmented import AugmentedMatrix, contraction_factor
from .schedule import Schedule, ScheduleKind, schedule_arrays, schedule_value

logger = logging.getLogger(__name__)


@dataclass
class ConditionEntry:
    """One inequality lhs < rhs (or the named relation)"""
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    note: Optional[str] = None


@dataclass
class ConditionReport:
    """Outcome of check_conditions"""
    kind: ScheduleKind
    entries: list[ConditionEntry] = field(default_factory=list)
    notes: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(entry.satisfied for entry in self.entries)

    def failures(self) -> list[ConditionEntry]:
        return [entry for entry in self.entries if not entry.satisfied]

    def add(self, name: str, lhs: float, rhs: float, satisfied: bool, note: Optional[str] = None) -> None:
        self.entries.append(ConditionEntry(name, float(lhs), float(rhs), bool(satisfied), note))

    def format_table(self) -> str:
        """Labeled text table, one condition per line"""
        width = max((len(entry.name) for entry in self.entries), default=10)
        lines = [f"schedule = {self.kind.value}", f"pass = {str(self.passed).lower()}"]
        for entry in self.entries:
            status = "ok" if entry.satisfied else "FAIL"
            line = f"{entry.name:<{width}}  lhs={entry.lhs:.10g}  rhs={entry.rhs:.10g}  {status}"
            if entry.note:
                line += f"  ({entry.note})"
            lines.append(line)
        for key in sorted(self.notes):
            lines.append(f"{key} = {self.notes[key]:.10g}")
        return "\n".join(lines) + "\n"


def alpha_bar(constants: GameConstants) -> float:
    """min{1/L, 1/(2μ)}"""
    return min(1.0 / constants.lip, 1.0 / (2.0 * constants.mu))


def consensus_bar(h: AugmentedMatrix) -> float:
    """min{λmin/(2λmax), 1/λmin}"""
    return min(h.lambda_min / (2.0 * h.lambda_max), 1.0 / h.lambda_min)


def horizon_tuned_step(constants: GameConstants, m: int, K: int) -> float:
    """Horizon-tuned step α_K = min{ᾱ, 4 ln(mK) / (μ m K)}"""
    tuned = 4.0 * math.log(m * K) / (constants.mu * m * K)
    return min(alpha_bar(constants), tuned)


def check_conditions(
    s: Schedule,
    c: GameConstants,
    h: AugmentedMatrix,
    m: int,
    inflate: bool = True,
) -> ConditionReport:
    """
    Check a schedule against the step-size conditions

    Constant schedules are checked against α < min{1/L, 1/(2μ)} and
    w < min{λmin/(2λmax), 1/λmin}. Diminishing schedules are checked against
    α_0 < 1/(2μ), w_0 < λmin/(2λmax), the sandwich
    8L/λmin·α_k < w_k < 1/(2mλmin) over the horizon, monotonicity and the
    summability properties of the chosen forms.

    Args:
        s: schedule
        c: raw game constants
        h: augmented matrix
        m: components per player
        inflate: apply the 5% safety inflation to c first

    Returns:
        ConditionReport: never raises for a failed condition
    """
    constants = c.conservative() if inflate else c
    report = ConditionReport(kind=s.kind)
    report.notes["alpha_bar"] = alpha_bar(constants)
    report.notes["horizon_tuned_alpha_K"] = horizon_tuned_step(constants, m, s.horizon)
    report.notes["lambda_min"] = h.lambda_min
    report.notes["lambda_max"] = h.lambda_max

    if s.kind is ScheduleKind.CONSTANT:
        _check_constant(report, s, constants, h)
    else:
        _check_diminishing(report, s, constants, h, m)

    if report.passed:
        logger.info(f"Schedule conditions pass: {s.describe()}")
    else:
        names = ", ".join(entry.name for entry in report.failures())
        logger.warning(f"Schedule conditions fail ({names}): {s.describe()}")
    return report


def _check_constant(report: ConditionReport, s: Schedule, c: GameConstants, h: AugmentedMatrix) -> None:
    alpha, w = s.alpha0, s.w0
    report.add("alpha > 0", alpha, 0.0, alpha > 0)
    report.add("alpha < min{1/L, 1/(2mu)}", alpha, alpha_bar(c), alpha < alpha_bar(c))
    report.add(
        "w < min{lambda_min/(2lambda_max), 1/lambda_min}",
        w,
        consensus_bar(h),
        w < consensus_bar(h),
    )
    report.notes["r"] = 1.0 - (alpha * c.mu - alpha**2 * c.mu**2)
    report.notes["s"] = contraction_factor(w, h.lambda_min, h.lambda_max)


def _check_diminishing(
    report: ConditionReport,
    s: Schedule,
    c: GameConstants,
    h: AugmentedMatrix,
    m: int,
) -> None:
    K = s.horizon
    lam = h.lambda_min
    sandwich_low = 8.0 * c.lip / lam
    sandwich_high = 1.0 / (2.0 * m * lam)

    try:
        alpha0, w0 = schedule_value(s, 0)
    except ScheduleError as e:
        report.add("clamp interval nonempty at k=0", sandwich_low * s.alpha0, sandwich_high, False, str(e))
        return

    report.add("alpha_0 > 0", alpha0, 0.0, alpha0 > 0)
    report.add("alpha_0 < 1/(2mu)", alpha0, 1.0 / (2.0 * c.mu), alpha0 < 1.0 / (2.0 * c.mu))
    report.add(
        "w_0 < lambda_min/(2lambda_max)",
        w0,
        h.max_consensus_step(),
        w0 < h.max_consensus_step(),
    )
    report.add("8L/lambda_min alpha_0 < w_0", sandwich_low * alpha0, w0, sandwich_low * alpha0 < w0)
    report.add("w_0 < 1/(2m lambda_min)", w0, sandwich_high, w0 < sandwich_high)

    alpha, w = schedule_arrays(s, K)
    violations = int(np.sum(~((sandwich_low * alpha < w) & (w < sandwich_high))))
    report.add("sandwich holds for k < K", violations, 0, violations == 0, "count of violating epochs")
    rises = int(np.sum(np.diff(alpha) > 0) + np.sum(np.diff(w) > 0))
    report.add("alpha_k, w_k nonincreasing", rises, 0, rises == 0, "count of increases")

    alpha_sum = float(alpha.sum())
    harmonic = s.alpha0 * math.log(K + 1)
    report.add(
        "sum alpha_k = inf",
        alpha_sum,
        harmonic,
        alpha0 > 0 and alpha_sum >= harmonic * (1.0 - 1e-12),
        "alpha0/(k+1) dominates alpha0*ln(K+1)",
    )
    w_floor = min(s.w0, sandwich_high) * 2.0 * (math.sqrt(K + 1) - 1.0)
    w_sum = float(w.sum())
    report.add(
        "sum w_k = inf",
        w_sum,
        w_floor,
        w_sum >= w_floor * (1.0 - 1e-12),
        "clamped w0/sqrt(k+1) dominates a multiple of 2(sqrt(K+1)-1)",
    )
    square_cap = s.alpha0**2 * math.pi**2 / 6.0
    square_sum = float(np.sum(alpha**2))
    report.add(
        "sum alpha_k^2 < inf",
        square_sum,
        square_cap,
        square_sum <= square_cap * (1.0 + 1e-12),
        "bounded by alpha0^2 pi^2/6",
    )


def constant_schedule_for(
    constants: GameConstants,
    h: AugmentedMatrix,
    horizon: int,
    fraction: float = 0.5,
) -> Schedule:
    """Constant schedule at a fraction of both constant-step limits (inflated constants)"""
    if not 0.0 < fraction < 1.0:
        raise ScheduleError(f"fraction must lie in (0, 1), got {fraction}")
    c = constants.conservative()
    return Schedule(
        kind=ScheduleKind.CONSTANT,
        alpha0=fraction * alpha_bar(c),
        w0=fraction * consensus_bar(h),
        horizon=horizon,
    )


def diminishing_schedule_for(
    constants: GameConstants,
    h: AugmentedMatrix,
    m: int,
    horizon: int,
    fraction: float = 0.5,
) -> Schedule:
    """
    Diminishing schedule satisfying every diminishing-step condition

    w0 is a fraction of min{λmin/(2λmax), 1/(2mλmin)}; alpha0 is a fraction of
    min{1/(2μ), λmin·w0/(8L)}. The result is bound to the inflated constants.
    """
    if not 0.0 < fraction < 1.0:
        raise ScheduleError(f"fraction must lie in (0, 1), got {fraction}")
    c = constants.conservative()
    w0 = fraction * min(h.max_consensus_step(), 1.0 / (2.0 * m * h.lambda_min))
    alpha0 = fraction * min(1.0 / (2.0 * c.mu), h.lambda_min * w0 / (8.0 * c.lip))
    schedule = Schedule(kind=ScheduleKind.DIMINISHING, alpha0=alpha0, w0=w0, horizon=horizon)
    return schedule.bound(c.lip, h.lambda_min, m)
