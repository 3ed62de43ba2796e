"""
Cross-run aggregation of e_k
"""

from dataclasses import dataclass
from pathlib import Path
import logging

import numpy as np
import pandas as pd

from ..dynamics.trace import FLOAT_FORMAT, RunTrace
from ..errors import AggregationError

logger = logging.getLogger(__name__)

AGGREGATE_COLUMNS = ("k", "arm", "mean_e", "std_e")


@dataclass
class AggregateStats:
    """Per-epoch mean and sample std of e_k for every arm"""
    frame: pd.DataFrame
    counts: dict[str, int]

    @property
    def arms(self) -> list[str]:
        return sorted(self.counts)

    def arm_frame(self, arm: str) -> pd.DataFrame:
        if arm not in self.counts:
            raise AggregationError(f"no arm named {arm}")
        return self.frame[self.frame["arm"] == arm].reset_index(drop=True)

    def final(self, arm: str) -> tuple[float, float]:
        """(mean_e, std_e) at the last epoch"""
        row = self.arm_frame(arm).iloc[-1]
        return float(row["mean_e"]), float(row["std_e"])


def aggregate(traces: list[RunTrace]) -> AggregateStats:
    """
    Mean and sample (n-1) standard deviation of e_k per epoch per arm

    A single run gives std 0.

    Raises:
        AggregationError: no traces, or runs with different K
    """
    if not traces:
        raise AggregationError("nothing to aggregate")
    grids = {trace.K for trace in traces}
    if len(grids) > 1:
        raise AggregationError(f"mismatched epoch grids: K in {sorted(grids)}")

    rows = pd.concat(
        [
            pd.DataFrame({"k": np.arange(trace.K + 1), "arm": trace.arm, "e": trace.e})
            for trace in traces
        ],
        ignore_index=True,
    )
    grouped = rows.groupby(["arm", "k"], sort=True)["e"]
    frame = grouped.agg(mean_e="mean", std_e=lambda e: e.std(ddof=1) if len(e) > 1 else 0.0)
    frame = frame.reset_index()[list(AGGREGATE_COLUMNS)]
    frame["std_e"] = frame["std_e"].fillna(0.0)

    counts: dict[str, int] = {}
    for trace in traces:
        counts[trace.arm] = counts.get(trace.arm, 0) + 1
    logger.info(f"Aggregated {len(traces)} runs: {counts}")
    return AggregateStats(frame=frame, counts=counts)


def write_csv(stats: AggregateStats, path: Path) -> Path:
    """Write k,arm,mean_e,std_e sorted by arm then k"""
    path = Path(path)
    frame = stats.frame.sort_values(["arm", "k"], kind="stable")
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan")
    logger.info(f"Wrote aggregate {path}")
    return path
