"""
Experiment orchestration

prepare() builds the shared objects of an experiment once: game, network, H,
equilibrium, constants, schedule and its condition report. run_experiment()
then dispatches every (seed, arm) pair against those same objects, so paired
arms differ only in the sampling rule, and writes the artifact directory.
"""

from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional
import logging

import numpy as np
import pandas as pd

from ..analysis.bounds import TheoryBounds, shuffle_variance_bound, theory_bounds
from ..analysis.oracles import NESolution, solve_ne_affine, solve_ne_fixed_point
from ..analysis.reference import shuffling_variance_mc
from ..dynamics.solvers import initial_estimates, initial_point
from ..dynamics.trace import InfoMode, RunTrace
from ..errors import BoundsError, PairingError, ScheduleError
from ..game.benchmarks import make_edge_game, make_ev_game
from ..game.constants import GameConstants, game_constants
from ..game.spec import GameKind, GameSpec
from ..game.tables import write_game_tables
from ..network.augmented import AugmentedMatrix, build_H
from ..network.mixing import NetworkSpec, make_network, write_network_tables
from ..sampling.conditions import (
    ConditionReport,
    check_conditions,
    constant_schedule_for,
    diminishing_schedule_for,
)
from ..sampling.schedule import Schedule, ScheduleKind
from .aggregate import AggregateStats, aggregate, write_csv
from .config import ExperimentConfig, dump_config
from .executor import RunExecutor, RunJob
from .manifest import RunManifest

logger = logging.getLogger(__name__)

NOT_APPLICABLE = "not applicable"


@dataclass
class ExperimentSetup:
    """Objects shared by every run of an experiment"""
    config: ExperimentConfig
    game: GameSpec
    network: NetworkSpec
    augmented: AugmentedMatrix
    ne: NESolution
    constants: GameConstants
    schedule: Schedule
    report: ConditionReport

    @property
    def K(self) -> int:
        return self.config.schedule.K


def build_game(config: ExperimentConfig) -> GameSpec:
    block = config.game
    if block.kind is GameKind.EV:
        return make_ev_game(block.n, block.m, block.seed, block.ev)
    return make_edge_game(block.n, block.m, block.seed, block.edge)


def solve_ne_for_config(config: ExperimentConfig, game: Optional[GameSpec] = None) -> tuple[GameSpec, NESolution]:
    """Build the configured game and solve its equilibrium"""
    game = game or build_game(config)
    if game.kind is GameKind.EV:
        ne = solve_ne_affine(game)
    else:
        ne = solve_ne_fixed_point(
            game,
            tol=config.oracle.tol,
            max_iters=config.oracle.max_iters,
            seed=config.game.seed,
        )
    return game, ne


def resolve_schedule(
    config: ExperimentConfig,
    constants: GameConstants,
    h: AugmentedMatrix,
    m: int,
) -> Schedule:
    """
    Turn the schedule block into a Schedule

    `auto` values come from the condition-passing helpers; explicit values
    override them. Diminishing schedules are bound to the inflated constants.
    """
    block = config.schedule
    if block.kind is ScheduleKind.CONSTANT:
        base = constant_schedule_for(constants, h, block.K, block.fraction)
    else:
        base = diminishing_schedule_for(constants, h, m, block.K, block.fraction)

    updates = {}
    if block.alpha0 != "auto":
        updates["alpha0"] = float(block.alpha0)
    if block.w0 != "auto":
        updates["w0"] = float(block.w0)
    if not updates:
        return base

    schedule = Schedule(
        kind=block.kind,
        alpha0=updates.get("alpha0", base.alpha0),
        w0=updates.get("w0", base.w0),
        horizon=block.K,
    )
    if schedule.kind is ScheduleKind.DIMINISHING:
        c = constants.conservative()
        schedule = schedule.bound(c.lip, h.lambda_min, m)
    return schedule


def prepare(config: ExperimentConfig) -> ExperimentSetup:
    """
    Build everything the runs share

    Raises:
        OracleError: the equilibrium oracle failed
        ScheduleError: the diminishing clamp is infeasible
    """
    game, ne = solve_ne_for_config(config)
    logger.info(f"Game {game.kind.value} n={game.n} m={game.m} hash={game.content_hash()[:12]}")
    constants = game_constants(
        game,
        ne.x_star,
        grid_points=config.oracle.grid_points,
        num_pairs=config.oracle.monotonicity_pairs,
        seed=config.game.seed,
    )
    network = make_network(config.network.kind, game.n, config.network.seed, config.network.p)
    augmented = build_H(network)
    schedule = resolve_schedule(config, constants, augmented, game.m)
    report = check_conditions(schedule, constants, augmented, game.m)
    return ExperimentSetup(
        config=config,
        game=game,
        network=network,
        augmented=augmented,
        ne=ne,
        constants=constants,
        schedule=schedule,
        report=report,
    )


def _initial_gaps(setup: ExperimentSetup, seeds: list[int]) -> tuple[float, float]:
    """Mean ‖x0 - x⋆‖² and mean ‖y0 - 1ₙ⊗x0‖² over the seeds"""
    a0, ybar0 = [], []
    for seed in seeds:
        x0 = initial_point(setup.game, seed)
        y0 = initial_estimates(x0, seed, setup.config.dynamics.perturb_y0)
        a0.append(float(np.sum((x0 - setup.ne.x_star) ** 2)))
        ybar0.append(float(np.sum((y0 - x0[None, :]) ** 2)))
    return float(np.mean(a0)), float(np.mean(ybar0))


def evaluate_bounds(setup: ExperimentSetup, seeds: list[int]) -> Optional[TheoryBounds]:
    """
    Closed-form bounds for a constant schedule, None for a diminishing one

    Raises:
        BoundsError: a contraction factor is outside (0, 1) and no override is set
    """
    if setup.schedule.kind is not ScheduleKind.CONSTANT:
        return None
    a0, ybar0 = _initial_gaps(setup, seeds)
    try:
        return theory_bounds(
            setup.constants.conservative(),
            setup.augmented,
            setup.schedule,
            setup.game.m,
            setup.game.n,
            setup.K,
            a0,
            ybar0,
        )
    except BoundsError:
        if not setup.config.dynamics.override:
            raise
        logger.warning("Bounds not available for the overridden schedule")
        return None


def check_experiment(config: ExperimentConfig, seed_offset: int = 0) -> tuple[ExperimentSetup, Optional[TheoryBounds]]:
    """Conditions and bounds without running anything"""
    setup = prepare(config)
    seeds = config.runs.seed_list(seed_offset)
    bounds = evaluate_bounds(setup, seeds) if setup.report.passed or config.dynamics.override else None
    return setup, bounds


def build_jobs(setup: ExperimentSetup, seeds: list[int], debug_inner: bool = False) -> list[RunJob]:
    dynamics = setup.config.dynamics
    jobs = []
    for seed in seeds:
        for info in setup.config.runs.info:
            for mode in setup.config.runs.modes:
                jobs.append(
                    RunJob(
                        game=setup.game,
                        schedule=setup.schedule,
                        K=setup.K,
                        seed=seed,
                        mode=mode,
                        info=info,
                        x_star=setup.ne.x_star,
                        network=setup.network if info is InfoMode.PARTIAL else None,
                        augmented=setup.augmented if info is InfoMode.PARTIAL else None,
                        gate=setup.report,
                        override=dynamics.override,
                        record_inner=debug_inner,
                        perturb_y0=dynamics.perturb_y0,
                        overwrite_own_estimate=dynamics.overwrite_own_estimate,
                    )
                )
    return jobs


def _record_manifest(
    setup: ExperimentSetup,
    seeds: list[int],
    traces: list[RunTrace],
    stats: AggregateStats,
) -> RunManifest:
    manifest = RunManifest()
    manifest.record(
        "experiment",
        game_kind=setup.game.kind.value,
        n=setup.game.n,
        m=setup.game.m,
        K=setup.K,
        seeds=",".join(str(seed) for seed in seeds),
        arms=",".join(stats.arms),
    )
    manifest.record("game", game_hash=setup.game.content_hash(), seed=setup.config.game.seed)
    manifest.record(
        "network",
        network_hash=setup.network.content_hash(),
        kind=setup.network.kind,
        lambda_min=repr(setup.augmented.lambda_min),
        lambda_max=repr(setup.augmented.lambda_max),
    )
    manifest.record(
        "equilibrium",
        method=setup.ne.method.value,
        residual=repr(setup.ne.residual),
        projected_residual=repr(setup.ne.projected_residual),
    )
    manifest.record(
        "schedule",
        schedule=setup.schedule.describe(),
        schedule_hash=setup.schedule.content_hash(),
        condition_pass=str(setup.report.passed).lower(),
    )
    for trace in traces:
        fields = {
            key: trace.meta[key]
            for key in ("game_hash", "network_hash", "x0_hash", "schedule_hash", "grad_evals_per_player_per_epoch")
            if key in trace.meta
        }
        manifest.record("run", arm=trace.arm, seed=trace.seed, e_final=repr(float(trace.e[-1])), **fields)
    manifest.record("aggregate", **{f"runs.{arm}": count for arm, count in sorted(stats.counts.items())})
    return manifest


def _check_oracle_cost(traces: list[RunTrace], m: int) -> None:
    for trace in traces:
        if trace.grad_evals_per_epoch != m:
            raise PairingError(
                f"{trace.arm} seed={trace.seed}: {trace.grad_evals_per_epoch} gradient "
                f"evaluations per player per epoch, expected {m}"
            )


def run_experiment(
    config: ExperimentConfig,
    output_dir: Optional[Path] = None,
    seed_offset: int = 0,
    jobs: int = 1,
    debug_inner: bool = False,
    generated_at: Optional[datetime] = None,
) -> Path:
    """
    Run every (seed, arm) pair and write the artifact directory

    Args:
        config: validated configuration
        output_dir: target directory, config.output.directory by default
        seed_offset: added to every run seed
        jobs: worker processes
        debug_inner: also write per-inner-step traces
        generated_at: manifest timestamp, now by default

    Returns:
        Path: the output directory

    Raises:
        OracleError: the equilibrium oracle failed
        ScheduleError: the schedule is infeasible or fails its conditions
            without override; conditions.txt is written first
        PairingError: arms of one seed did not share game, network, x0 or schedule
    """
    out = Path(output_dir or config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(dump_config(config), encoding="utf-8")

    setup = prepare(config)
    seeds = config.runs.seed_list(seed_offset)
    write_game_tables(setup.game, out)
    write_network_tables(setup.network, out)
    (out / "ne.txt").write_text(setup.ne.format_text(), encoding="utf-8")
    (out / "conditions.txt").write_text(setup.report.format_table(), encoding="utf-8")

    if setup.schedule.kind is ScheduleKind.CONSTANT and not setup.report.passed and not config.dynamics.override:
        raise ScheduleError(f"constant schedule fails its conditions, see {out / 'conditions.txt'}")

    bounds = evaluate_bounds(setup, seeds)
    bounds_text = bounds.format_text(setup.K) if bounds is not None else f"{NOT_APPLICABLE}\n"
    (out / "bounds.txt").write_text(bounds_text, encoding="utf-8")

    traces = RunExecutor(jobs).run(build_jobs(setup, seeds, debug_inner))
    for trace in traces:
        trace.write(out / "traces")
    _check_oracle_cost(traces, setup.game.m)

    stats = aggregate(traces)
    write_csv(stats, out / "aggregate.csv")

    manifest = _record_manifest(setup, seeds, traces, stats)
    manifest.check_pairing()
    manifest.write(out / "manifest.txt", generated_at)
    logger.info(f"Experiment finished: {len(traces)} runs in {out}")
    return out


def variance_study(config: ExperimentConfig, output_dir: Optional[Path] = None) -> tuple[pd.DataFrame, float]:
    """
    Shuffling variance against the step-size bound over config.variance.alphas

    Writes variance.csv and variance.txt when output_dir is given.

    Returns:
        (frame, slope): one row per step size, and the log-log slope of the
        estimate against alpha (nan with a single step size)
    """
    game, ne = solve_ne_for_config(config)
    constants = game_constants(
        game,
        ne.x_star,
        grid_points=config.oracle.grid_points,
        num_pairs=config.oracle.monotonicity_pairs,
        seed=config.game.seed,
    )
    rows = []
    for alpha in sorted(config.variance.alphas, reverse=True):
        # same permutations at every step size
        rng = np.random.default_rng(config.variance.seed)
        estimate = shuffling_variance_mc(game, ne, alpha, config.variance.num_perms, rng)
        worst = int(np.argmax(estimate.sigma_shuffle_sq))
        rows.append(
            {
                "alpha": alpha,
                "sigma_shuffle_sq": float(estimate.sigma_shuffle_sq[worst]),
                "std_error": float(estimate.std_error[worst]),
                "bound": shuffle_variance_bound(alpha, constants, game.m, game.n),
                "approximate": estimate.approximate,
            }
        )
    frame = pd.DataFrame(rows, columns=["alpha", "sigma_shuffle_sq", "std_error", "bound", "approximate"])

    slope = float("nan")
    positive = frame[frame["sigma_shuffle_sq"] > 0]
    if len(positive) >= 2:
        slope = float(np.polyfit(np.log(positive["alpha"]), np.log(positive["sigma_shuffle_sq"]), 1)[0])

    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out / "variance.csv", index=False, float_format="%.17g")
        dominated = bool((frame["sigma_shuffle_sq"] <= frame["bound"] + 3 * frame["std_error"]).all())
        (out / "variance.txt").write_text(
            f"slope = {slope:.6g}\nbound_dominates = {str(dominated).lower()}\n", encoding="utf-8"
        )
        logger.info(f"Wrote variance study to {out}")
    return frame, slope
