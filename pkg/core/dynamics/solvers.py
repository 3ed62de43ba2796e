"""
Equilibrium-seeking dynamics

Full information: every player sees the joint profile. At inner step ℓ all
players evaluate their sampled component at the same x_k^ℓ and update at once:
    x^{ℓ+1} = P[x^ℓ - α_k g(x^ℓ)]

Partial information: player i only holds its estimate row y_i. With the
stacked estimate y (row-major, n² entries) and H from the network:
    x^{ℓ+1} = P[x^ℓ - α_k g(y^ℓ)]
    y^{ℓ+1} = y^ℓ - w_k H (y^ℓ - 1ₙ⊗x^ℓ)
Both updates read step-ℓ values only. Player i's gradient uses its own row,
own coordinate included.

RR mode draws a fresh permutation per player per epoch; SGD mode draws m
indices with replacement. Either way an epoch costs m component-gradient
evaluations per player.
"""

from typing import Optional, Tuple
import hashlib
import logging

import numpy as np
import pandas as pd

from ..analysis.metrics import disagreement_norm, error_metric
from ..errors import ScheduleError
from ..game.constants import INFLATION, curvature_bounds
from ..game.costs import component_grads, local_component_grads
from ..game.spec import ActionProfile, EstimateMatrix, GameKind, GameSpec, project
from ..network.augmented import AugmentedMatrix, build_H
from ..network.mixing import NetworkSpec
from ..sampling.conditions import ConditionReport
from ..sampling.permutations import EpochSampler, SamplingMode
from ..sampling.schedule import Schedule, ScheduleKind, schedule_value
from ..sampling.streams import StreamFactory, StreamPurpose
from .trace import InfoMode, RunTrace

logger = logging.getLogger(__name__)

ESTIMATE_CLAMP_MARGIN = 1e-9


def initial_point(game: GameSpec, seed: int) -> ActionProfile:
    """x0 uniform in the box, from the run's INIT stream"""
    return game.box.sample(StreamFactory(seed).run_generator(StreamPurpose.INIT))


def initial_estimates(x0: ActionProfile, seed: int, perturb: float = 0.0) -> EstimateMatrix:
    """1ₙ⊗x0 as an (n, n) matrix, plus N(0, perturb²) noise when perturb > 0"""
    n = x0.shape[0]
    y0 = np.tile(x0, (n, 1))
    if perturb > 0.0:
        rng = StreamFactory(seed).run_generator(StreamPurpose.PERTURB)
        y0 = y0 + perturb * rng.standard_normal((n, n))
    return y0


def check_gate(schedule: Schedule, gate: Optional[ConditionReport], override: bool) -> None:
    """
    Constant schedules run only with a passing ConditionReport, unless overridden

    Raises:
        ScheduleError: gate missing or failed, without override
    """
    if schedule.kind is not ScheduleKind.CONSTANT:
        return
    if override:
        if gate is None or not gate.passed:
            logger.warning(f"Running constant schedule without a passing condition report: {schedule.describe()}")
        return
    if gate is None:
        raise ScheduleError("constant schedule requires a condition report (or override)")
    if not gate.passed:
        names = ", ".join(entry.name for entry in gate.failures())
        raise ScheduleError(f"constant schedule failed its conditions: {names}")


def prepare_schedule(
    schedule: Schedule,
    game: GameSpec,
    augmented: Optional[AugmentedMatrix] = None,
) -> Schedule:
    """
    Validate a schedule against the run it drives

    Without an augmented matrix (full information) only the component count
    of a clamped schedule is checked; w is never read. With one (partial
    information) w_0 must be positive, and a clamped diminishing schedule must
    carry this network's λmin and an L within the inflation factor of the
    game's. An unclamped diminishing schedule is clamped here against the inflated L.

    Raises:
        ScheduleError: the schedule cannot drive this run
    """
    bind = schedule.bind
    if bind is not None and bind.m != game.m:
        raise ScheduleError(f"schedule clamped for m={bind.m}, game has m={game.m}")
    if augmented is None:
        return schedule

    if schedule.kind is ScheduleKind.DIMINISHING:
        _, lip = curvature_bounds(game)
        if bind is None:
            schedule = schedule.bound(lip * INFLATION, augmented.lambda_min, game.m)
            logger.info(f"Clamped diminishing schedule against L={lip * INFLATION:.6g}: {schedule.describe()}")
        elif not np.isclose(bind.lambda_min, augmented.lambda_min, rtol=1e-9, atol=0.0):
            raise ScheduleError(
                f"schedule clamped for lambda_min={bind.lambda_min:.6g}, "
                f"network has lambda_min={augmented.lambda_min:.6g}"
            )
        elif bind.lip * INFLATION < lip:
            raise ScheduleError(f"schedule clamped for L={bind.lip:.6g} below the game's L={lip:.6g}")

    if schedule_value(schedule, 0)[1] <= 0.0:
        raise ScheduleError("partial-information runs need w_0 > 0")
    return schedule


def full_info_step(
    game: GameSpec,
    x: ActionProfile,
    idx: np.ndarray,
    alpha: float,
) -> ActionProfile:
    """One inner step with full decision information; x is not modified"""
    return project(x - alpha * component_grads(game, idx, x), game.box)


def estimate_bounds(game: GameSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Per-coordinate clamp interval applied to estimates before Edge gradient evaluation"""
    return game.box.lower + ESTIMATE_CLAMP_MARGIN, game.box.upper - ESTIMATE_CLAMP_MARGIN


def partial_info_step(
    game: GameSpec,
    H: np.ndarray,
    x: ActionProfile,
    y: EstimateMatrix,
    idx: np.ndarray,
    alpha: float,
    w: float,
    overwrite_own_estimate: bool = False,
) -> Tuple[ActionProfile, EstimateMatrix, int]:
    """
    One inner step with partial decision information

    Neither x nor y is modified; both new values are computed from the old.

    Returns:
        tuple: (x_next, y_next, number of estimate entries clamped)
    """
    n = game.n
    view = y
    if overwrite_own_estimate:
        view = y.copy()
        view[np.diag_indices(n)] = x

    clamped = 0
    if game.kind is GameKind.EDGE:
        low, high = estimate_bounds(game)
        safe = np.clip(view, low[None, :], high[None, :])
        clamped = int(np.count_nonzero(safe != view))
        view = safe

    x_next = project(x - alpha * local_component_grads(game, idx, view), game.box)
    y_flat = y.reshape(-1)
    y_next = y_flat - w * (H @ (y_flat - np.tile(x, n)))
    return x_next, y_next.reshape(n, n), clamped


def _metadata(
    game: GameSpec,
    schedule: Schedule,
    mode: SamplingMode,
    info: InfoMode,
    seed: int,
    K: int,
    x0: ActionProfile,
    evals: int,
    gate: Optional[ConditionReport],
    override: bool,
) -> dict[str, str]:
    per_player = evals // game.n
    return {
        "mode": mode.value,
        "info": info.value,
        "seed": str(seed),
        "K": str(K),
        "n": str(game.n),
        "m": str(game.m),
        "game_hash": game.content_hash(),
        "schedule": schedule.describe(),
        "schedule_hash": schedule.content_hash(),
        "x0_hash": hashlib.sha256(np.ascontiguousarray(x0).tobytes()).hexdigest(),
        "grad_evals_per_player": str(per_player),
        "grad_evals_per_player_per_epoch": str(per_player // K),
        "condition_pass": "none" if gate is None else str(gate.passed).lower(),
        "override": str(override).lower(),
    }


def _start(game: GameSpec, seed: int, x0: Optional[ActionProfile]) -> ActionProfile:
    if x0 is None:
        return initial_point(game, seed)
    x0 = np.asarray(x0, dtype=np.float64)
    if not game.box.contains(x0):
        raise ValueError("x0 must lie in the box")
    return x0.copy()


def run_full_info(
    game: GameSpec,
    schedule: Schedule,
    K: int,
    seed: int,
    mode: SamplingMode | str,
    x_star: ActionProfile,
    *,
    gate: Optional[ConditionReport] = None,
    override: bool = False,
    record_inner: bool = False,
    x0: Optional[ActionProfile] = None,
) -> RunTrace:
    """
    Projected RR / SGD dynamics with full decision information

    Args:
        game: the game
        schedule: step-size schedule (w is ignored)
        K: number of epochs
        seed: run seed
        mode: rr or sgd
        x_star: equilibrium used by the metrics
        gate: condition report required for constant schedules
        override: run a constant schedule without a passing gate
        record_inner: keep per-inner-step rows
        x0: start point, drawn from the seed by default

    Returns:
        RunTrace: K+1 rows

    Raises:
        ScheduleError: constant schedule without a passing gate
        MetricError: x0 equals x_star
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    mode = SamplingMode(mode)
    check_gate(schedule, gate, override)
    schedule = prepare_schedule(schedule, game)
    x_star = np.asarray(x_star, dtype=np.float64)
    n, m = game.n, game.m

    x = _start(game, seed, x0)
    x_init = x.copy()
    sampler = EpochSampler(StreamFactory(seed), n, m, mode)

    iterates = np.empty((K + 1, n))
    alphas = np.empty(K + 1)
    iterates[0] = x
    inner_rows = []
    evals = 0

    for k in range(K):
        alpha, _ = schedule_value(schedule, k)
        alphas[k] = alpha
        idx = sampler.indices(k)
        for ell in range(m):
            x = full_info_step(game, x, idx[ell], alpha)
            evals += n
            if record_inner:
                inner_rows.append((k, ell, float(np.sum((x - x_star) ** 2)), np.nan))
        iterates[k + 1] = x
    alphas[K] = schedule_value(schedule, K)[0]

    e = np.array([error_metric(xk, x_init, x_star) for xk in iterates])
    sq_err = np.sum((iterates - x_star[None, :]) ** 2, axis=1)
    meta = _metadata(game, schedule, mode, InfoMode.FULL, seed, K, x_init, evals, gate, override)
    logger.info(f"Run {mode.value}_full seed={seed} done: e_K={e[-1]:.4f}")
    return RunTrace(
        mode=mode,
        info=InfoMode.FULL,
        seed=seed,
        e=e,
        sq_err=sq_err,
        disagreement=np.full(K + 1, np.nan),
        alpha=alphas,
        w=np.full(K + 1, np.nan),
        iterates=iterates,
        meta=meta,
        inner=_inner_frame(inner_rows) if record_inner else None,
    )


def run_partial_info(
    game: GameSpec,
    network: NetworkSpec,
    schedule: Schedule,
    K: int,
    seed: int,
    mode: SamplingMode | str,
    x_star: ActionProfile,
    *,
    gate: Optional[ConditionReport] = None,
    override: bool = False,
    record_inner: bool = False,
    x0: Optional[ActionProfile] = None,
    perturb_y0: float = 0.0,
    overwrite_own_estimate: bool = False,
    augmented: Optional[AugmentedMatrix] = None,
) -> RunTrace:
    """
    Projected RR / SGD dynamics with estimate tracking over a network

    Args:
        game: the game
        network: communication network
        schedule: step-size schedule
        K: number of epochs
        seed: run seed
        mode: rr or sgd
        x_star: equilibrium used by the metrics
        gate: condition report required for constant schedules
        override: run a constant schedule without a passing gate
        record_inner: keep per-inner-step rows
        x0: start point, drawn from the seed by default
        perturb_y0: standard deviation of the y0 perturbation (0 keeps y0 = 1ₙ⊗x0)
        overwrite_own_estimate: evaluate gradients with y_ii replaced by x_i (experimental)
        augmented: precomputed H for the network

    Returns:
        RunTrace: K+1 rows with the disagreement column filled
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if network.n != game.n:
        raise ValueError(f"network has {network.n} nodes, game has {game.n} players")
    mode = SamplingMode(mode)
    check_gate(schedule, gate, override)
    x_star = np.asarray(x_star, dtype=np.float64)
    n, m = game.n, game.m
    augmented = augmented or build_H(network)
    schedule = prepare_schedule(schedule, game, augmented)
    H = augmented.H

    x = _start(game, seed, x0)
    x_init = x.copy()
    y = initial_estimates(x, seed, perturb_y0)
    sampler = EpochSampler(StreamFactory(seed), n, m, mode)

    iterates = np.empty((K + 1, n))
    disagreement = np.empty(K + 1)
    alphas = np.empty(K + 1)
    ws = np.empty(K + 1)
    iterates[0] = x
    disagreement[0] = disagreement_norm(y, x)
    inner_rows = []
    evals = 0
    clamp_events = 0

    for k in range(K):
        alpha, w = schedule_value(schedule, k)
        alphas[k], ws[k] = alpha, w
        idx = sampler.indices(k)
        for ell in range(m):
            x, y, clamped = partial_info_step(game, H, x, y, idx[ell], alpha, w, overwrite_own_estimate)
            evals += n
            if clamped:
                clamp_events += clamped
                logger.debug(f"epoch {k} step {ell}: clamped {clamped} estimate entries")
            if record_inner:
                inner_rows.append((k, ell, float(np.sum((x - x_star) ** 2)), disagreement_norm(y, x)))
        iterates[k + 1] = x
        disagreement[k + 1] = disagreement_norm(y, x)
    alphas[K], ws[K] = schedule_value(schedule, K)

    e = np.array([error_metric(xk, x_init, x_star) for xk in iterates])
    sq_err = np.sum((iterates - x_star[None, :]) ** 2, axis=1)
    meta = _metadata(game, schedule, mode, InfoMode.PARTIAL, seed, K, x_init, evals, gate, override)
    meta.update(
        {
            "network_hash": network.content_hash(),
            "network_kind": network.kind,
            "clamp_events": str(clamp_events),
            "perturb_y0": repr(float(perturb_y0)),
            "overwrite_own_estimate": str(overwrite_own_estimate).lower(),
        }
    )
    logger.info(f"Run {mode.value}_partial seed={seed} done: e_K={e[-1]:.4f}, clamps={clamp_events}")
    return RunTrace(
        mode=mode,
        info=InfoMode.PARTIAL,
        seed=seed,
        e=e,
        sq_err=sq_err,
        disagreement=disagreement,
        alpha=alphas,
        w=ws,
        iterates=iterates,
        meta=meta,
        inner=_inner_frame(inner_rows) if record_inner else None,
    )


def _inner_frame(rows: list) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=["k", "ell", "sq_err", "disagreement"])
