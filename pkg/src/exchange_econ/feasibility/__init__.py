"""Static analysis: sustainability verdicts, stationary policies, region sampling."""
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LPResult, lp_solve
from .maxflow import FlowNetwork, MaxFlowResult, build_maxflow_network, max_flow
from .region import RegionSample, boundary_along, default_directions, sample_region_boundary
from .sustainability import (
    FeasibilityReport,
    StationaryPolicy,
    check_sustainability_1c,
    check_sustainability_maxflow,
    in_production_region,
    interior_margin_1c,
    production_region_margin,
    production_region_margin_lp,
    region_lp,
    stationary_policy_1c,
)

__all__ = [
    "INFEASIBLE",
    "OPTIMAL",
    "UNBOUNDED",
    "LPResult",
    "lp_solve",
    "FlowNetwork",
    "MaxFlowResult",
    "build_maxflow_network",
    "max_flow",
    "RegionSample",
    "boundary_along",
    "default_directions",
    "sample_region_boundary",
    "FeasibilityReport",
    "StationaryPolicy",
    "check_sustainability_1c",
    "check_sustainability_maxflow",
    "in_production_region",
    "interior_margin_1c",
    "production_region_margin",
    "production_region_margin_lp",
    "region_lp",
    "stationary_policy_1c",
]
