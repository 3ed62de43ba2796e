"""
Per-epoch run traces

A RunTrace holds one row per epoch k = 0..K and the run metadata. It is
written as <arm>_seed<s>.csv with header k,e,sq_err,disagreement,alpha,w plus a
<arm>_seed<s>.meta key = value sidecar; inner-step rows, when recorded, go to
<arm>_seed<s>_inner.csv.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional
import logging

import numpy as np
import pandas as pd

from ..sampling.permutations import SamplingMode

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("k", "e", "sq_err", "disagreement", "alpha", "w")
FLOAT_FORMAT = "%.17g"


class InfoMode(str, Enum):
    """Decision information available to the players"""
    FULL = "full"
    PARTIAL = "partial"


def arm_name(mode: SamplingMode | str, info: InfoMode | str) -> str:
    return f"{SamplingMode(mode).value}_{InfoMode(info).value}"


@dataclass(eq=False)
class RunTrace:
    """One run of one arm"""
    mode: SamplingMode
    info: InfoMode
    seed: int
    e: np.ndarray
    sq_err: np.ndarray
    disagreement: np.ndarray
    alpha: np.ndarray
    w: np.ndarray
    iterates: np.ndarray
    meta: dict[str, str] = field(default_factory=dict)
    inner: Optional[pd.DataFrame] = None

    @property
    def arm(self) -> str:
        return arm_name(self.mode, self.info)

    @property
    def K(self) -> int:
        return int(self.e.shape[0]) - 1

    @property
    def x_final(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def grad_evals_per_epoch(self) -> int:
        return int(self.meta["grad_evals_per_player_per_epoch"])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "k": np.arange(self.K + 1),
                "e": self.e,
                "sq_err": self.sq_err,
                "disagreement": self.disagreement,
                "alpha": self.alpha,
                "w": self.w,
            },
            columns=list(TRACE_COLUMNS),
        )

    def stem(self) -> str:
        return f"{self.arm}_seed{self.seed}"

    def write(self, directory: Path) -> Path:
        """Write the CSV, the .meta sidecar and the optional inner-step CSV"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.stem()}.csv"
        self.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan")
        meta_lines = [f"{key} = {self.meta[key]}" for key in sorted(self.meta)]
        (directory / f"{self.stem()}.meta").write_text("\n".join(meta_lines) + "\n", encoding="utf-8")
        if self.inner is not None:
            self.inner.to_csv(
                directory / f"{self.stem()}_inner.csv",
                index=False,
                float_format=FLOAT_FORMAT,
                na_rep="nan",
            )
        logger.debug(f"Wrote trace {path}")
        return path


def read_trace_frame(path: Path) -> pd.DataFrame:
    """Load a trace CSV written by RunTrace.write"""
    frame = pd.read_csv(path, float_precision="round_trip")
    if tuple(frame.columns) != TRACE_COLUMNS:
        raise ValueError(f"{path}: unexpected trace columns {list(frame.columns)}")
    return frame
