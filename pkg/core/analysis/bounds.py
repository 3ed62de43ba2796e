"""
Closed-form convergence bounds for constant schedules

All right-hand sides are evaluated exactly as stated, from the game constants,
the augmented matrix spectrum and the schedule. The consensus factor is
s = 1 - (wλmin - w²λmax) throughout.
"""

from dataclasses import asdict, dataclass
import logging
import math

from ..errors import BoundsError
from ..game.constants import GameConstants
from ..network.augmented import AugmentedMatrix, contraction_factor
from ..sampling.conditions import horizon_tuned_step
from ..sampling.schedule import Schedule, ScheduleKind

logger = logging.getLogger(__name__)


def shuffle_variance_bound(alpha: float, constants: GameConstants, m: int, n: int) -> float:
    """Shuffling variance bound α² L m n σ⋆² / 4"""
    return alpha**2 * constants.lip * m * n * constants.sigma_star_sq / 4.0


@dataclass(frozen=True)
class TheoryBounds:
    """Bound ingredients; the rhs methods evaluate at any horizon K"""
    alpha: float
    w: float
    mu: float
    lip: float
    kappa: float
    gbound: float
    sigma_star_sq: float
    lambda_min: float
    lambda_max: float
    m: int
    n: int
    A0: float
    ybar0_sq: float
    r: float
    s: float
    rho: float

    def full_info_rhs(self, K: int) -> float:
        """Full information: (1-μα)^{mK} A0 + α³ L m n² σ⋆² / (2μ)"""
        transient = (1.0 - self.mu * self.alpha) ** (self.m * K) * self.A0
        return transient + self.full_info_residual()

    def full_info_residual(self) -> float:
        return self.alpha**3 * self.lip * self.m * self.n**2 * self.sigma_star_sq / (2.0 * self.mu)

    def partial_info_rhs(self, K: int) -> float:
        """Partial information with constant α, w"""
        return (
            self.r ** (self.m * K) * self.A0
            + self.tracking_transient(K)
            + self.partial_info_residual()
        )

    def tracking_transient(self, K: int, per_inner_step: bool = False) -> float:
        """4κm‖ȳ0‖² K ρ^{K-1}, or K ρ^{m(K-1)} with per_inner_step"""
        exponent = self.m * (K - 1) if per_inner_step else K - 1
        return 4.0 * self.kappa * self.m * self.ybar0_sq * K * self.rho ** max(exponent, 0)

    def partial_info_residual(self) -> float:
        wl = self.w * self.lambda_min
        return (
            16.0 * self.kappa * self.n**2 * self.gbound**2 * (wl + 1.0) / wl**2 * self.alpha**2
            + self.m * self.n**3 * self.kappa * self.sigma_star_sq * self.alpha**2
            + 4.0 * self.alpha * self.n * self.gbound**2 / self.mu
        )

    def consensus_steady(self) -> float:
        """1/(wλmin - w²λmax) · (n²α²G²/(wλmin) + n²α²G²)"""
        wl = self.w * self.lambda_min
        drive = self.n**2 * self.alpha**2 * self.gbound**2
        return (drive / wl + drive) / (1.0 - self.s)

    def consensus_rhs(self, k: int) -> float:
        """s^{mk}‖ȳ0‖² + consensus_steady"""
        return self.s ** (self.m * k) * self.ybar0_sq + self.consensus_steady()

    def horizon_tuned_rhs(self, K: int) -> dict[str, float]:
        """
        Horizon-tuned bound terms at step α_K

        The two Õ terms are reported without their hidden logarithmic factors.
        """
        constants = GameConstants(
            mu=self.mu,
            lip=self.lip,
            muF=self.mu,
            gbound=self.gbound,
            sigma_star_sq=self.sigma_star_sq,
            kappa_cond=self.kappa,
        )
        alpha_K = horizon_tuned_step(constants, self.m, K)
        mu, m, n, G = self.mu, self.m, self.n, self.gbound
        wl = self.w * self.lambda_min
        terms = {
            "alpha_K": alpha_K,
            "transient": math.exp(-alpha_K * mu * m * K / 2.0) * self.A0,
            "tracking": self.tracking_transient(K, per_inner_step=True),
            "order_1_over_K": n * G**2 / (mu**2 * m * K),
            "order_1_over_K2": (
                self.kappa * n**2 * G**2 / (mu**2 * m * K**2) * (wl + 1.0) / wl**2
                + n**3 * self.kappa * self.sigma_star_sq / (mu**2 * m * K**2)
            ),
        }
        terms["total"] = sum(v for key, v in terms.items() if key != "alpha_K")
        return terms

    def format_text(self, K: int) -> str:
        lines = [f"{key} = {value:.17g}" for key, value in asdict(self).items()]
        lines += [
            f"K = {K}",
            f"full_info_rhs = {self.full_info_rhs(K):.17g}",
            f"full_info_residual = {self.full_info_residual():.17g}",
            f"partial_info_rhs = {self.partial_info_rhs(K):.17g}",
            f"partial_info_residual = {self.partial_info_residual():.17g}",
            f"tracking_transient_epoch_exponent = {self.tracking_transient(K):.17g}",
            f"tracking_transient_inner_exponent = {self.tracking_transient(K, True):.17g}",
            f"consensus_steady = {self.consensus_steady():.17g}",
            f"consensus_rhs = {self.consensus_rhs(K):.17g}",
        ]
        lines += [f"horizon_tuned.{key} = {value:.17g}" for key, value in self.horizon_tuned_rhs(K).items()]
        return "\n".join(lines) + "\n"


def theory_bounds(
    constants: GameConstants,
    h: AugmentedMatrix,
    schedule: Schedule,
    m: int,
    n: int,
    K: int,
    A0: float,
    ybar0_sq: float = 0.0,
) -> TheoryBounds:
    """
    Evaluate the bound ingredients for a constant schedule

    Args:
        constants: game constants (pass conservative ones for reporting)
        h: augmented matrix
        schedule: constant schedule
        m: components per player
        n: players
        K: horizon, logged only
        A0: ‖x0 - x⋆‖² (or its mean over seeds)
        ybar0_sq: ‖ȳ0‖²

    Raises:
        BoundsError: non-constant schedule, or a contraction factor outside (0, 1)
    """
    if schedule.kind is not ScheduleKind.CONSTANT:
        raise BoundsError("closed-form bounds apply to constant schedules only")
    alpha, w = schedule.alpha0, schedule.w0
    r = 1.0 - (alpha * constants.mu - alpha**2 * constants.mu**2)
    s = contraction_factor(w, h.lambda_min, h.lambda_max)
    for name, factor in (("r", r), ("s", s)):
        if not 0.0 < factor < 1.0:
            raise BoundsError(f"contraction factor {name}={factor:.6g} is outside (0, 1)")

    bounds = TheoryBounds(
        alpha=alpha,
        w=w,
        mu=constants.mu,
        lip=constants.lip,
        kappa=constants.lip / constants.mu,
        gbound=constants.gbound,
        sigma_star_sq=constants.sigma_star_sq,
        lambda_min=h.lambda_min,
        lambda_max=h.lambda_max,
        m=m,
        n=n,
        A0=A0,
        ybar0_sq=ybar0_sq,
        r=r,
        s=s,
        rho=max(r, s),
    )
    logger.info(
        f"Theory bounds at K={K}: partial_info_rhs={bounds.partial_info_rhs(K):.4g}, "
        f"consensus_steady={bounds.consensus_steady():.4g}"
    )
    return bounds
