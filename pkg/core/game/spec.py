"""
Finite-sum game objects

A game has n players with scalar actions, m cost components per player, a box
feasible set and a symmetric zero-diagonal coupling matrix. Parameter tables are
stored as (n, m) arrays; EVComponentParams / EdgeComponentParams are the row
views for one (i, ell) pair.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union
import hashlib

import numpy as np
import numpy.typing as npt

from ..errors import ConfigurationError, GameDomainError

# Joint action x, entry i is player i's scalar action.
ActionProfile = npt.NDArray[np.float64]
# Row i is player i's estimate of the whole profile.
EstimateMatrix = npt.NDArray[np.float64]


def _frozen(array: npt.ArrayLike, dtype=np.float64) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class GameKind(str, Enum):
    """Benchmark game family"""
    EV = "ev"        # EV charging, quadratic components
    EDGE = "edge"    # edge resource admission, entropy + barrier + log-sum-exp


@dataclass(frozen=True, eq=False)
class Box:
    """Product of intervals [lower_i, upper_i]"""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower)
        upper = _frozen(self.upper)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigurationError("box bounds must be 1-d vectors of equal length")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ConfigurationError("box bounds must be finite")
        if not np.all(lower < upper):
            raise ConfigurationError("box requires lower[i] < upper[i] for every i")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return int(self.lower.shape[0])

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def sample(self, rng: np.random.Generator) -> ActionProfile:
        """Uniform point in the box"""
        return rng.uniform(self.lower, self.upper)

    def shrink(self, margin: float) -> "Box":
        """Box pulled inward by margin on every side"""
        return Box(self.lower + margin, self.upper - margin)


@dataclass(frozen=True)
class EVComponentParams:
    """EV component (i, ell): q/2 (x_i - d)^2 + b x_i + coupling"""
    q: float
    d: float
    b: float


@dataclass(frozen=True)
class EdgeComponentParams:
    """Edge component (i, ell): entropy, barrier, linear and congestion terms"""
    a: float
    kappa: float
    b: float
    dcong: float
    r: float


@dataclass(frozen=True, eq=False)
class EVParamTable:
    """EV parameters, each field shaped (n, m)"""
    q: np.ndarray
    d: np.ndarray
    b: np.ndarray

    COLUMNS = ("q", "d", "b")

    def __post_init__(self):
        for name in self.COLUMNS:
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if not (self.q.shape == self.d.shape == self.b.shape) or self.q.ndim != 2:
            raise ConfigurationError("EV parameter tables must share an (n, m) shape")
        if not np.all(self.q > 0):
            raise ConfigurationError("EV weights q must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.q.shape

    def component(self, i: int, ell: int) -> EVComponentParams:
        return EVComponentParams(
            q=float(self.q[i, ell]),
            d=float(self.d[i, ell]),
            b=float(self.b[i, ell]),
        )


@dataclass(frozen=True, eq=False)
class EdgeParamTable:
    """Edge parameters, each field shaped (n, m)"""
    a: np.ndarray
    kappa: np.ndarray
    b: np.ndarray
    dcong: np.ndarray
    r: np.ndarray

    COLUMNS = ("a", "kappa", "b", "dcong", "r")

    def __post_init__(self):
        for name in self.COLUMNS:
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        shapes = {getattr(self, name).shape for name in self.COLUMNS}
        if len(shapes) != 1 or self.a.ndim != 2:
            raise ConfigurationError("Edge parameter tables must share an (n, m) shape")
        if not np.all(self.a > 0):
            raise ConfigurationError("Edge entropy weights a must be positive")
        if np.any(self.kappa < 0) or np.any(self.dcong < 0):
            raise ConfigurationError("Edge kappa and dcong must be nonnegative")

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def component(self, i: int, ell: int) -> EdgeComponentParams:
        return EdgeComponentParams(
            a=float(self.a[i, ell]),
            kappa=float(self.kappa[i, ell]),
            b=float(self.b[i, ell]),
            dcong=float(self.dcong[i, ell]),
            r=float(self.r[i, ell]),
        )


ParamTable = Union[EVParamTable, EdgeParamTable]


@dataclass(frozen=True, eq=False)
class GameSpec:
    """
    Finite-sum game

    Immutable after construction: every array is read-only, so a GameSpec can
    be shared between threads and pickled into worker processes.
    """
    kind: GameKind
    box: Box
    coupling: np.ndarray
    params: ParamTable
    capacity: Optional[np.ndarray] = None   # c̄_i, Edge only
    slope: Optional[np.ndarray] = None      # β_i, Edge only

    def __post_init__(self):
        coupling = _frozen(self.coupling)
        object.__setattr__(self, "coupling", coupling)
        n = self.box.n
        if coupling.shape != (n, n):
            raise ConfigurationError(f"coupling must be {n}x{n}")
        if np.any(np.diag(coupling) != 0.0):
            raise ConfigurationError("coupling diagonal must be zero")

        if self.params.shape[0] != n:
            raise ConfigurationError("parameter tables must have one row per player")

        if self.kind is GameKind.EV:
            if not isinstance(self.params, EVParamTable):
                raise ConfigurationError("EV game requires an EVParamTable")
        else:
            if not isinstance(self.params, EdgeParamTable):
                raise ConfigurationError("Edge game requires an EdgeParamTable")
            if self.capacity is None or self.slope is None:
                raise ConfigurationError("Edge game requires capacity and slope")
            capacity = _frozen(self.capacity)
            slope = _frozen(self.slope)
            object.__setattr__(self, "capacity", capacity)
            object.__setattr__(self, "slope", slope)
            if capacity.shape != (n,) or slope.shape != (n,):
                raise ConfigurationError("capacity and slope must have length n")
            if not np.all(self.box.lower > 0):
                raise ConfigurationError("Edge box must satisfy lower[i] > 0")
            if not np.all(self.box.upper < capacity):
                raise ConfigurationError("Edge box must satisfy upper[i] < capacity[i]")

    @property
    def n(self) -> int:
        return self.box.n

    @property
    def m(self) -> int:
        return self.params.shape[1]

    def check_index(self, i: int, ell: int) -> None:
        if not 0 <= i < self.n:
            raise GameDomainError(f"player index {i} out of range [0, {self.n})")
        if not 0 <= ell < self.m:
            raise GameDomainError(f"component index {ell} out of range [0, {self.m})")

    def content_hash(self) -> str:
        """sha256 over every array that defines the game"""
        digest = hashlib.sha256()
        digest.update(self.kind.value.encode())
        arrays = [self.box.lower, self.box.upper, self.coupling]
        arrays += [getattr(self.params, name) for name in self.params.COLUMNS]
        if self.capacity is not None:
            arrays += [self.capacity, self.slope]
        for array in arrays:
            digest.update(np.ascontiguousarray(array).tobytes())
        return digest.hexdigest()


def project(x: npt.ArrayLike, box: Box) -> ActionProfile:
    """
    Euclidean projection onto the box (componentwise clamp)

    Args:
        x: point to project
        box: feasible set

    Returns:
        ActionProfile: the closest point of the box
    """
    return np.clip(np.asarray(x, dtype=np.float64), box.lower, box.upper)
