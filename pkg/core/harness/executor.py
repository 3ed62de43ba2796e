"""
Run executor

Executes the (seed, arm) jobs of an experiment. Jobs are independent and
deterministic given their seed, so they can run in worker processes; results
come back sorted by (arm, seed) whatever the completion order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional
import asyncio
import logging
import time

import numpy as np

from ..dynamics.solvers import run_full_info, run_partial_info
from ..dynamics.trace import InfoMode, RunTrace, arm_name
from ..game.spec import GameSpec
from ..network.augmented import AugmentedMatrix
from ..network.mixing import NetworkSpec
from ..sampling.conditions import ConditionReport
from ..sampling.permutations import SamplingMode
from ..sampling.schedule import Schedule

logger = logging.getLogger(__name__)


@dataclass
class RunJob:
    """Everything one run needs; must stay picklable"""
    game: GameSpec
    schedule: Schedule
    K: int
    seed: int
    mode: SamplingMode
    info: InfoMode
    x_star: np.ndarray
    network: Optional[NetworkSpec] = None
    augmented: Optional[AugmentedMatrix] = None
    gate: Optional[ConditionReport] = None
    override: bool = False
    record_inner: bool = False
    perturb_y0: float = 0.0
    overwrite_own_estimate: bool = False

    @property
    def arm(self) -> str:
        return arm_name(self.mode, self.info)


def execute_job(job: RunJob) -> RunTrace:
    """Run one job in the current process"""
    if job.info is InfoMode.FULL:
        return run_full_info(
            job.game,
            job.schedule,
            job.K,
            job.seed,
            job.mode,
            job.x_star,
            gate=job.gate,
            override=job.override,
            record_inner=job.record_inner,
        )
    if job.network is None:
        raise ValueError(f"{job.arm} seed={job.seed}: partial information needs a network")
    return run_partial_info(
        job.game,
        job.network,
        job.schedule,
        job.K,
        job.seed,
        job.mode,
        job.x_star,
        gate=job.gate,
        override=job.override,
        record_inner=job.record_inner,
        perturb_y0=job.perturb_y0,
        overwrite_own_estimate=job.overwrite_own_estimate,
        augmented=job.augmented,
    )


class RunExecutor:
    """
    Bounded-concurrency job runner

    With jobs == 1 everything runs inline in the event loop thread; otherwise
    each job goes to a process pool and at most `jobs` are in flight.
    """

    def __init__(self, jobs: int = 1):
        if jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {jobs}")
        self.jobs = jobs
        self._stats = {"completed": 0, "failed": 0, "elapsed_s": 0.0}

    def get_stats(self) -> dict:
        return dict(self._stats)

    async def execute(
        self,
        job: RunJob,
        pool: Optional[ProcessPoolExecutor] = None,
    ) -> RunTrace:
        """
        Execute one job

        Args:
            job: the run
            pool: process pool, None to run inline

        Returns:
            RunTrace: the finished run

        Raises:
            Exception: whatever the run raised, after counting it as failed
        """
        start = time.time()
        try:
            if pool is None:
                trace = execute_job(job)
            else:
                loop = asyncio.get_running_loop()
                trace = await loop.run_in_executor(pool, execute_job, job)
        except Exception as e:
            self._stats["failed"] += 1
            logger.error(f"Run {job.arm} seed={job.seed} failed: {e}")
            raise
        self._stats["completed"] += 1
        self._stats["elapsed_s"] += time.time() - start
        return trace

    async def run_all(self, jobs: list[RunJob]) -> list[RunTrace]:
        """Execute every job and return the traces sorted by (arm, seed)"""
        if not jobs:
            return []
        logger.info(f"Executing {len(jobs)} runs with {self.jobs} worker(s)")

        if self.jobs == 1:
            traces = [await self.execute(job) for job in jobs]
        else:
            semaphore = asyncio.Semaphore(self.jobs)
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:

                async def bounded(job: RunJob) -> RunTrace:
                    async with semaphore:
                        return await self.execute(job, pool)

                traces = await asyncio.gather(*(bounded(job) for job in jobs))

        return sorted(traces, key=lambda trace: (trace.arm, trace.seed))

    def run(self, jobs: list[RunJob]) -> list[RunTrace]:
        """Synchronous wrapper around run_all"""
        return asyncio.run(self.run_all(jobs))
