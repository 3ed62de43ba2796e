"""
Experiment configuration

Files are flat `key = value` lines with dotted section prefixes, `#` comments
and comma-separated lists:

    game.kind = ev
    game.n = 5
    game.ev.q = 1.0, 2.0
    schedule.kind = constant
    schedule.alpha0 = auto
    runs.modes = rr, sgd

Only game.kind and schedule.kind are required. dump_config writes the
canonical form; loading it back gives an equal ExperimentConfig.
"""

from pathlib import Path
from typing import Any, Literal, Optional, Union
import logging

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..dynamics.trace import InfoMode
from ..errors import ConfigurationError
from ..game.benchmarks import EdgeRanges, EVRanges
from ..game.spec import GameKind
from ..network.graph import GraphKind
from ..sampling.permutations import SamplingMode
from ..sampling.schedule import ScheduleKind

logger = logging.getLogger(__name__)

Auto = Literal["auto"]

# Keys whose values are always lists, even with a single element
LIST_KEYS = {"runs.seeds", "runs.modes", "runs.info", "variance.alphas"}


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GameBlock(_Block):
    kind: GameKind
    n: int = Field(default=5, ge=2)
    m: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0)
    ev: EVRanges = EVRanges()
    edge: EdgeRanges = EdgeRanges()


class NetworkBlock(_Block):
    kind: GraphKind = GraphKind.RING
    p: Optional[float] = Field(default=None, gt=0, le=1)
    seed: int = Field(default=0, ge=0)


class ScheduleBlock(_Block):
    kind: ScheduleKind
    alpha0: Union[float, Auto] = "auto"
    w0: Union[float, Auto] = "auto"
    K: int = Field(default=1000, ge=1)
    fraction: float = Field(default=0.5, gt=0, lt=1)


class RunsBlock(_Block):
    count: int = Field(default=20, ge=1)
    seeds: Optional[list[int]] = None
    modes: list[SamplingMode] = Field(default=[SamplingMode.RR, SamplingMode.SGD], min_length=1)
    info: list[InfoMode] = Field(default=[InfoMode.PARTIAL], min_length=1)

    def seed_list(self, offset: int = 0) -> list[int]:
        base = self.seeds if self.seeds is not None else list(range(self.count))
        return [seed + offset for seed in base]


class DynamicsBlock(_Block):
    perturb_y0: float = Field(default=0.0, ge=0)
    overwrite_own_estimate: bool = False
    override: bool = False


class OracleBlock(_Block):
    tol: float = Field(default=1e-12, gt=0)
    max_iters: int = Field(default=500_000, ge=1)
    grid_points: int = Field(default=1024, ge=2)
    monotonicity_pairs: int = Field(default=2000, ge=1)


class VarianceBlock(_Block):
    alphas: list[float] = Field(default=[1e-2, 5e-3, 2.5e-3], min_length=1)
    num_perms: int = Field(default=512, ge=2)
    seed: int = Field(default=0, ge=0)


class OutputBlock(_Block):
    directory: str = "results"


class ExperimentConfig(_Block):
    """Complete experiment description"""
    game: GameBlock
    network: NetworkBlock = NetworkBlock()
    schedule: ScheduleBlock
    runs: RunsBlock = RunsBlock()
    dynamics: DynamicsBlock = DynamicsBlock()
    oracle: OracleBlock = OracleBlock()
    variance: VarianceBlock = VarianceBlock()
    output: OutputBlock = OutputBlock()

    def ranges(self) -> EVRanges | EdgeRanges:
        return self.game.ev if self.game.kind is GameKind.EV else self.game.edge


def _parse_value(key: str, raw: str) -> Any:
    if key in LIST_KEYS or "," in raw:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _insert(tree: dict, key: str, value: Any, line: int) -> None:
    parts = key.split(".")
    node = tree
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigurationError("key is both a value and a section", key=key, line=line)
        node = child
    if isinstance(node.get(parts[-1]), dict):
        raise ConfigurationError("key is both a value and a section", key=key, line=line)
    node[parts[-1]] = value


def parse_config_text(text: str) -> ExperimentConfig:
    """
    Parse configuration text

    Raises:
        ConfigurationError: malformed line, duplicate, unknown or missing key,
            or a value of the wrong type; carries the line number when known
    """
    tree: dict = {}
    lines: dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigurationError("expected 'key = value'", line=number)
        key, raw = (part.strip() for part in content.split("=", 1))
        if not key or any(not part for part in key.split(".")):
            raise ConfigurationError("empty key", line=number)
        if key in lines:
            raise ConfigurationError(f"duplicate key (first set on line {lines[key]})", key=key, line=number)
        lines[key] = number
        _insert(tree, key, _parse_value(key, raw), number)

    try:
        config = ExperimentConfig.model_validate(tree)
    except ValidationError as e:
        error = e.errors()[0]
        key = _error_key(error["loc"], lines)
        line = _line_for(key, lines)
        if error["type"] == "missing":
            raise ConfigurationError("missing required key", key=key) from None
        if error["type"] == "extra_forbidden":
            raise ConfigurationError("unknown key", key=key, line=line) from None
        raise ConfigurationError(error["msg"], key=key, line=line) from None

    config.ranges().validate_ranges()
    return config


def _error_key(loc: tuple, lines: dict[str, int]) -> str:
    parts = [str(part) for part in loc if not isinstance(part, int)]
    # union members add a trailing type tag to the location
    for end in range(len(parts), 0, -1):
        candidate = ".".join(parts[:end])
        if candidate in lines:
            return candidate
    return ".".join(parts)


def _line_for(key: str, lines: dict[str, int]) -> Optional[int]:
    if key in lines:
        return lines[key]
    # errors on a section or a union member point at the first key below it
    candidates = [number for name, number in lines.items() if name.startswith(key + ".") or key.startswith(name + ".")]
    return min(candidates) if candidates else None


def load_config(path: Path | str) -> ExperimentConfig:
    """Read and validate a configuration file"""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    config = parse_config_text(path.read_text(encoding="utf-8"))
    logger.info(f"Loaded config {path}: game={config.game.kind.value} schedule={config.schedule.kind.value}")
    return config


def _flatten(prefix: str, value: Any, out: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for name, child in value.items():
            _flatten(f"{prefix}.{name}" if prefix else name, child, out)
    elif value is None:
        return
    elif isinstance(value, (list, tuple)):
        out.append((prefix, ", ".join(_format_scalar(item) for item in value)))
    else:
        out.append((prefix, _format_scalar(value)))


def _format_scalar(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: ExperimentConfig) -> str:
    """Canonical text form, every field spelled out"""
    pairs: list[tuple[str, str]] = []
    _flatten("", config.model_dump(mode="json"), pairs)
    return "\n".join(f"{key} = {value}" for key, value in pairs) + "\n"
