"""
Error hierarchy for rrnash.

Every failure raised by the library derives from RRNashError so the CLI can map
it to an exit code in one place.
"""

from typing import Optional


class RRNashError(Exception):
    """Base class for all rrnash errors"""
    pass


class GameDomainError(RRNashError):
    """Component oracle evaluated outside its index range or domain"""
    pass


class ConfigurationError(RRNashError):
    """Invalid configuration (parameter ranges or config file contents)"""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        line: Optional[int] = None,
    ):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)


class MonotonicityViolationError(RRNashError):
    """Estimated strong monotonicity modulus is not positive"""
    pass


class GraphError(RRNashError):
    """Communication graph is invalid or could not be generated"""
    pass


class SpectralError(RRNashError):
    """Spectral bounds requested for a non-symmetric matrix"""
    pass


class ScheduleError(RRNashError):
    """Step-size schedule is infeasible or failed its condition gate"""
    pass


class OracleError(RRNashError):
    """Equilibrium oracle failed"""
    pass


class BoundsError(RRNashError):
    """Theoretical bound cannot be evaluated (contraction outside (0,1))"""
    pass


class MetricError(RRNashError):
    """Error metric normalization is degenerate"""
    pass


class AggregationError(RRNashError):
    """Traces cannot be aggregated"""
    pass


class PairingError(RRNashError):
    """Paired arms do not share game, network, x0 and schedule"""
    pass


class SamplingError(RRNashError):
    """An epoch's component draws broke the sampling contract"""
    pass
