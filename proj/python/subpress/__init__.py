"""Pressure, entropy, and variational diagnostics for random subshifts of finite type."""

from ._core import (
    CheckResult,
    ConfigError,
    Experiment,
    Measure,
    PhiStarEstimate,
    PressureEstimate,
    ResourceError,
    TraceRow,
    VariationalReport,
    VerifyReport,
    __version__,
    entropy_rate,
    fiber_entropy,
    load_config,
    objective,
    parse_config,
    phistar,
    power_pressure,
    pressure,
    sample_measure,
    varprinciple,
    verify,
)

__all__ = [
    "CheckResult",
    "ConfigError",
    "Experiment",
    "Measure",
    "PhiStarEstimate",
    "PressureEstimate",
    "ResourceError",
    "TraceRow",
    "VariationalReport",
    "VerifyReport",
    "__version__",
    "entropy_rate",
    "fiber_entropy",
    "load_config",
    "objective",
    "parse_config",
    "phistar",
    "power_pressure",
    "pressure",
    "sample_measure",
    "varprinciple",
    "verify",
]
