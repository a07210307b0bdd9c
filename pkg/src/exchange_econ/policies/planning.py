"""Period-level decisions: production plans, independent-cost baselines, cost queues."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ..errors import ConfigurationError, EntityNotSelfSustainableError, InvalidArgumentError
from ..feasibility.lp import lp_solve
from ..model import ProductionPlan

__all__ = [
    "peaked_backlogs",
    "plan_select_alg2",
    "plan_select_alg3",
    "plan_scores_alg3",
    "virtual_queue_update",
    "independent_cost_lp",
    "realized_independent_cost",
    "RealizedCost",
    "IndependentCostBenchmark",
]


def _plan_arrays(plans_j: Sequence):
    rates = np.array([p.rates if isinstance(p, ProductionPlan) else p[0] for p in plans_j], dtype=float)
    costs = np.array([p.cost if isinstance(p, ProductionPlan) else p[1] for p in plans_j], dtype=float)
    return rates, costs


def peaked_backlogs(x, consumers: Sequence[int]) -> np.ndarray:
    """Keep each listed consumer's largest backlog entry and zero the rest.

    Equal maxima keep the lowest commodity index. Consumers not listed get an
    all-zero row.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in consumers:
        k = int(np.argmax(x[i]))
        out[i, k] = x[i, k]
    return out


def _first_argmax(values: Sequence[float]) -> int:
    best, best_v = 0, values[0]
    for idx, v in enumerate(values):
        if v > best_v:
            best, best_v = idx, v
    return best


def _alg2_choice(x: list, rates_j: list, out_neighbors) -> int:
    """List-based core of :func:`plan_select_alg2` (shared with the simulator)."""
    demand = _peaked_demand(x, out_neighbors, len(rates_j[0]))
    scores = [math.fsum(d * r for d, r in zip(demand, rates)) for rates in rates_j]
    return _first_argmax(scores)


def plan_select_alg2(x, plans_j: Sequence, out_neighbors: Sequence[int]) -> int:
    """Plan that best serves the neediest commodity of every neighbour."""
    if len(plans_j) == 0:
        raise ConfigurationError("empty plan set")
    rates, _ = _plan_arrays(plans_j)
    x = np.asarray(x, dtype=float)
    return _alg2_choice(x.tolist(), rates.tolist(), list(out_neighbors))


def _alg3_scores(served: list, y_j: float, j_bar: float, rates_j: list, costs_j: list,
                 period_length: int, v_param: float) -> list:
    scores = []
    for rates, cost in zip(rates_j, costs_j):
        service = period_length * math.fsum(s * r for s, r in zip(served, rates))
        scores.append(v_param * (j_bar - cost) - 2.0 * (y_j * cost - service))
    scores.append(v_param * j_bar)
    return scores


def _peaked_demand(x: list, out_neighbors, k_dim: int) -> list:
    """Column sums of the peaked backlogs over ``out_neighbors``."""
    demand = [0.0] * k_dim
    for i in out_neighbors:
        row = x[i]
        k_star = 0
        for k in range(1, k_dim):
            if row[k] > row[k_star]:
                k_star = k
        demand[k_star] += row[k_star]
    return demand


def plan_scores_alg3(x_hat, y_j: float, j_bar: float, plans_j: Sequence, period_length: int, v_param: float):
    """Drift-plus-penalty score of every plan, followed by the idle score."""
    rates, costs = _plan_arrays(plans_j)
    served = np.asarray(x_hat, dtype=float).sum(axis=0).tolist()
    return _alg3_scores(served, y_j, j_bar, rates.tolist(), costs.tolist(), period_length, v_param)


def plan_select_alg3(
    x_hat, y_j: float, j_bar: float, plans_j: Sequence, period_length: int, v_param: float
) -> Optional[int]:
    """Plan maximising the cost-aware score, or ``None`` when idling scores strictly best.

    ``x_hat`` holds the peaked backlogs of the producer's neighbours (rows of
    other consumers must be zero).
    """
    if len(plans_j) == 0:
        raise ConfigurationError("empty plan set")
    scores = plan_scores_alg3(x_hat, y_j, j_bar, plans_j, period_length, v_param)
    best = _first_argmax(scores)
    return None if best == len(plans_j) else best


def virtual_queue_update(y: float, j_realized: float, period_cost: float) -> float:
    for name, v in (("y", y), ("j_realized", j_realized), ("period_cost", period_cost)):
        if not math.isfinite(v) or v < 0:
            raise InvalidArgumentError(f"{name} must be finite and non-negative, got {v}")
    return max(y - j_realized, 0.0) + period_cost


@lru_cache(maxsize=65536)
def _independent_lp(rates_key: tuple, costs_key: tuple, demand_key: tuple):
    rates = np.array(rates_key, dtype=float)
    costs = np.array(costs_key, dtype=float)
    demand = np.array(demand_key, dtype=float)
    n_plans, k_dim = rates.shape
    A_ub = np.vstack([-rates.T, np.ones((1, n_plans))])
    b_ub = np.concatenate([-demand, [1.0]])
    res = lp_solve(costs, A_ub, b_ub, bounds=(0.0, 1.0))
    if not res.success:
        return None
    zeta = np.clip(res.x, 0.0, 1.0)
    return max(float(costs @ zeta), 0.0), tuple(zeta)


@lru_cache(maxsize=65536)
def _max_coverage(rates_key: tuple, demand_key: tuple) -> float:
    """Largest ``theta`` in [0, 1] such that ``theta * demand`` is coverable."""
    rates = np.array(rates_key, dtype=float)
    demand = np.array(demand_key, dtype=float)
    n_plans = rates.shape[0]
    c = np.zeros(n_plans + 1)
    c[-1] = 1.0
    A_ub = np.vstack([
        np.column_stack([-rates.T, demand]),
        np.concatenate([np.ones(n_plans), [0.0]]),
    ])
    b_ub = np.concatenate([np.zeros(len(demand)), [1.0]])
    res = lp_solve(c, A_ub, b_ub, bounds=(0.0, 1.0), maximize=True)
    return float(res.x[-1])


def independent_cost_lp(a_j, plans_j: Sequence):
    """Cheapest plan mix covering the entity's own mean demand ``a_j``.

    Returns ``(cost, zeta)``; raises :class:`EntityNotSelfSustainableError` if
    no mix of the entity's own plans covers ``a_j``.
    """
    rates, costs = _plan_arrays(plans_j)
    a_j = np.asarray(a_j, dtype=float).ravel()
    if a_j.shape != (rates.shape[1],) or (a_j < 0).any():
        raise InvalidArgumentError("demand must be a non-negative vector with one entry per commodity")
    if not a_j.any():
        return 0.0, np.zeros(len(costs))
    out = _independent_lp(tuple(map(tuple, rates)), tuple(costs), tuple(a_j))
    if out is None:
        raise EntityNotSelfSustainableError(f"own plans cannot cover demand {a_j.tolist()}")
    cost, zeta = out
    return cost, np.array(zeta)


class RealizedCost(NamedTuple):
    value: float
    capped: bool  # demand exceeded what the entity alone can produce


def realized_independent_cost(own_demand, plans_j: Sequence, period_length: int) -> RealizedCost:
    """Stand-alone cost of this period's own requests.

    ``own_demand`` counts the entity's pending requests at the period start plus
    the requests that arrived during the period; dividing by the period length
    gives the per-slot rate fed to the independent-cost LP. When the rate is
    beyond what the entity's own plans can cover, the demand is scaled down to
    the largest coverable multiple and the result is flagged.
    """
    rates, costs = _plan_arrays(plans_j)
    d = np.asarray(own_demand, dtype=float).ravel() / period_length
    if not d.any():
        return RealizedCost(0.0, False)
    rk, ck, dk = tuple(map(tuple, rates)), tuple(costs), tuple(d)
    out = _independent_lp(rk, ck, dk)
    if out is not None:
        return RealizedCost(out[0], False)
    theta = _max_coverage(rk, dk)
    out = _independent_lp(rk, ck, tuple(theta * d * (1 - 1e-12)))
    return RealizedCost(out[0] if out is not None else 0.0, True)


@dataclass
class IndependentCostBenchmark:
    """Running mean of each entity's realized stand-alone cost per period."""

    n_entities: int
    j_bar: np.ndarray = field(init=False)
    j_t: np.ndarray = field(init=False)
    n_periods: int = field(default=0, init=False)

    def __post_init__(self):
        self.j_bar = np.zeros(self.n_entities)
        self.j_t = np.zeros(self.n_entities)

    def update(self, realized) -> None:
        realized = np.asarray(realized, dtype=float)
        if (realized < 0).any():
            raise InvalidArgumentError("realized costs must be non-negative")
        self.n_periods += 1
        self.j_t = realized.copy()
        self.j_bar = self.j_bar + (realized - self.j_bar) / self.n_periods
