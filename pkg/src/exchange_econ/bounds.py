"""Closed-form backlog and optimality-gap bounds of the three online policies.

Every bound is driven by the interior margin ``eps(a)``: the largest uniform
increase of the demand that keeps it inside the relevant region. Demands on
or outside the boundary have no finite bound and raise
:class:`UndefinedBoundError`.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from .errors import InfeasibleError, RegionError, UndefinedBoundError
from .feasibility.lp import lp_solve
from .feasibility.sustainability import (
    interior_margin_1c,
    production_region_margin,
    region_lp,
)
from .model import EconomyConfig
from .policies.nbs import independent_costs

__all__ = [
    "theorem1_bound",
    "theorem2_bound",
    "theorem3_bounds",
    "bounded_cost_margin",
    "Theorem3Bounds",
    "MARGIN_FLOOR",
]

# margins below this are treated as "on the boundary"
MARGIN_FLOOR = 1e-9


def _means(config: EconomyConfig, a) -> np.ndarray:
    a = config.arrival_means if a is None else np.asarray(a, dtype=float)
    return a.reshape(config.n_entities, config.n_commodities)


def _checked(eps: float) -> float:
    if not eps > MARGIN_FLOOR:
        raise UndefinedBoundError(f"demand is not strictly interior (margin {eps:.3g})")
    return eps


def theorem1_bound(config: EconomyConfig, a=None, eps: Optional[float] = None) -> float:
    """``(N A_max^2 + sum_i d_in(i) B_max^2) / (2 eps(a))`` for a single commodity.

    ``eps`` may be passed to skip the bisection.
    """
    a = _means(config, a)
    if config.n_commodities != 1:
        raise UndefinedBoundError("the single-commodity bound needs K = 1")
    if eps is None:
        b = np.array([plans_j[0].rates[0] for plans_j in config.plans])
        try:
            eps = interior_margin_1c(config.graph, a[:, 0], b)
        except InfeasibleError as exc:
            raise UndefinedBoundError("demand lies outside the sustainability region") from exc
    eps = _checked(eps)
    n = config.n_entities
    a_max, b_max = config.a_max, config.max_rate
    d_in = config.graph.in_degree
    return (n * a_max**2 + float(d_in.sum()) * b_max**2) / (2.0 * eps)


def theorem2_bound(config: EconomyConfig, a=None, eps: Optional[float] = None) -> float:
    """``(N K A_max^2 + sum_{i,k} sum_{j in N_i} (B*_jk)^2) / (eps / T)``.

    ``B*_jk`` is producer ``j``'s largest rate for commodity ``k`` over its plans.
    """
    a = _means(config, a)
    if eps is None:
        try:
            eps = production_region_margin(config.graph, config.plans, a)
        except InfeasibleError as exc:
            raise UndefinedBoundError("demand lies outside the production region") from exc
    eps = _checked(eps)
    n, k_dim, T = config.n_entities, config.n_commodities, config.period_length
    b_star = np.array([[max(p.rates[k] for p in plans_j) for k in range(k_dim)] for plans_j in config.plans])
    service = 0.0
    for i in range(n):
        for j in config.graph.in_neighbors[i]:
            service += float((b_star[j] ** 2).sum())
    return (n * k_dim * config.a_max**2 + service) / (eps / T)


def bounded_cost_margin(config: EconomyConfig, a=None) -> float:
    """Margin of ``a`` inside the region whose plan mixes also respect every
    entity's stand-alone cost at ``a``.

    Solved as one LP; negative when no such mix serves ``a``.
    """
    a = _means(config, a)
    graph, plans = config.graph, config.plans
    try:
        j_ind = independent_costs(plans, a)
    except RegionError as exc:
        raise UndefinedBoundError(str(exc)) from exc
    lp = region_lp(graph, plans, a, extra_cols=1, demand_shift_col=0)
    cost_rows = np.zeros((len(plans), lp.n_vars))
    for (j, p), col in lp.zeta_index.items():
        cost_rows[j, col] = plans[j][p].cost
    A = np.vstack([lp.A_ub, cost_rows])
    b = np.concatenate([lp.b_ub, j_ind])
    top = config.max_rate * config.n_entities + float(a.max(initial=0.0)) + 1.0
    c = np.zeros(lp.n_vars)
    c[-1] = 1.0
    bounds = [(0.0, None)] * (lp.n_vars - 1) + [(-top, top)]
    res = lp_solve(c, A, b, bounds=bounds, maximize=True)
    if not res.success:
        raise UndefinedBoundError("no plan mix serves the demand within the stand-alone costs")
    return float(res.x[-1])


class Theorem3Bounds(NamedTuple):
    backlog: float  # (C + V G_max) / eps
    gap: float  # C / V
    c_const: float
    g_max: float
    eps: float


def theorem3_bounds(config: EconomyConfig, a=None, v_param: Optional[float] = None,
                    eps: Optional[float] = None) -> Theorem3Bounds:
    """Backlog bound and Nash-product optimality gap of the cost-aware policy.

    ``C = T K N A_max^2 + T K sum_i (d_in(i) B_max^2 + 2 c_max(i)^2)`` and
    ``G_max`` is the product of the entities' largest plan costs.
    """
    a = _means(config, a)
    v = config.v_param if v_param is None else float(v_param)
    if not (v > 0 and math.isfinite(v)):
        raise UndefinedBoundError("V must be positive and finite")
    if eps is None:
        eps = bounded_cost_margin(config, a)
    eps = _checked(eps)
    n, k_dim, T = config.n_entities, config.n_commodities, config.period_length
    b_max = config.max_rate
    d_in = config.graph.in_degree
    c_max = np.array([max(p.cost for p in plans_j) for plans_j in config.plans])
    c_const = T * k_dim * n * config.a_max**2 + T * k_dim * float(
        (d_in * b_max**2 + 2.0 * c_max**2).sum()
    )
    g_max = float(np.prod(c_max))
    return Theorem3Bounds((c_const + v * g_max) / eps, c_const / v, c_const, g_max, eps)
