"""Policies and a slotted simulator for cooperative exchange economies.

Entities sit on a directed graph, generate demand for K commodities, produce
resources under selectable plans and ship them to each other. The package
covers the static side (is a demand vector sustainable, what does the region
look like, what is the bargaining benchmark) and the dynamic side (max-weight
allocation, period-level plan selection, cost queues).
"""
from .bounds import Theorem3Bounds, bounded_cost_margin, theorem1_bound, theorem2_bound, theorem3_bounds
from .engine import MetricsTrace, Summary, regression_slope, run
from .errors import (
    ConfigurationError,
    EntityNotSelfSustainableError,
    ExchangeEconError,
    InfeasibleError,
    InvalidArgumentError,
    InvalidDecisionError,
    RegionError,
    SizeError,
    UndefinedBoundError,
)
from .model import (
    ArrivalKind,
    ArrivalSpec,
    EconomyConfig,
    ExchangeGraph,
    Policy,
    PolicyDecision,
    ProductionPlan,
    SimState,
    queue_update,
    received_service,
    sample_arrivals,
)

__version__ = "0.1.0"

__all__ = [
    "Theorem3Bounds",
    "bounded_cost_margin",
    "theorem1_bound",
    "theorem2_bound",
    "theorem3_bounds",
    "MetricsTrace",
    "Summary",
    "regression_slope",
    "run",
    "ConfigurationError",
    "EntityNotSelfSustainableError",
    "ExchangeEconError",
    "InfeasibleError",
    "InvalidArgumentError",
    "InvalidDecisionError",
    "RegionError",
    "SizeError",
    "UndefinedBoundError",
    "ArrivalKind",
    "ArrivalSpec",
    "EconomyConfig",
    "ExchangeGraph",
    "Policy",
    "PolicyDecision",
    "ProductionPlan",
    "SimState",
    "queue_update",
    "received_service",
    "sample_arrivals",
]
