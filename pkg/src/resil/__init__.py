"""Resilience metrics for outage/restore events.

Closed-form area, nadir and duration of the mean performance curve under
Poisson-rate models, the same quantities for recorded event data, and a
Monte Carlo simulator used to cross-check the formulas.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    ParseError,
    ResilError,
    ValidationError,
    VariantError,
)
from .model import (  # noqa: E402
    AtTime,
    ConstantRestore,
    EventModel,
    ExponentialRestore,
    LognormalRestore,
    MetricsReport,
    NadirResult,
    OnInterval,
    OutageModel,
    area_closed_form,
    area_numeric,
    metrics,
    nadir,
    restore_durations,
)
from .numerics import Tolerance  # noqa: E402

__all__ = [
    "AtTime",
    "ConstantRestore",
    "ConvergenceError",
    "DomainError",
    "EventModel",
    "ExponentialRestore",
    "LognormalRestore",
    "MetricsReport",
    "NadirResult",
    "OnInterval",
    "OutageModel",
    "ParseError",
    "ResilError",
    "Tolerance",
    "ValidationError",
    "VariantError",
    "area_closed_form",
    "area_numeric",
    "metrics",
    "nadir",
    "restore_durations",
]
