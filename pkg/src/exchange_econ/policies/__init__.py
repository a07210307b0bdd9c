"""Online control policies and the static bargaining benchmark."""
from .allocation import allocation_weight, centralized_maxweight, maxweight_allocate
from .nbs import NbsSolution, check_nbs_constraints, independent_costs, nbs_benchmark
from .planning import (
    IndependentCostBenchmark,
    RealizedCost,
    independent_cost_lp,
    peaked_backlogs,
    plan_scores_alg3,
    plan_select_alg2,
    plan_select_alg3,
    realized_independent_cost,
    virtual_queue_update,
)

__all__ = [
    "allocation_weight",
    "centralized_maxweight",
    "maxweight_allocate",
    "NbsSolution",
    "check_nbs_constraints",
    "independent_costs",
    "nbs_benchmark",
    "IndependentCostBenchmark",
    "RealizedCost",
    "independent_cost_lp",
    "peaked_backlogs",
    "plan_scores_alg3",
    "plan_select_alg2",
    "plan_select_alg3",
    "realized_independent_cost",
    "virtual_queue_update",
]
