"""Sustainability of demand rates: subset conditions, max-flow, region LP.

Single-commodity economies are sustainable iff every consumer subset ``Q``
can be covered by the producers adjacent to it::

    sum(a[i] for i in Q) <= sum(b[j] for j in N_Q)

For several commodities and production plans the region is the convex hull of
all achievable service matrices; membership is a small LP over per-edge
service rates ``s[j, i, k]`` and plan probabilities ``zeta[j, p]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InfeasibleError, SizeError
from ..model import ExchangeGraph, ProductionPlan
from .lp import lp_solve
from .maxflow import FLOW_EPS, build_maxflow_network, max_flow

__all__ = [
    "FeasibilityReport",
    "StationaryPolicy",
    "check_sustainability_1c",
    "check_sustainability_maxflow",
    "stationary_policy_1c",
    "interior_margin_1c",
    "RegionLP",
    "region_lp",
    "in_production_region",
    "production_region_margin",
    "production_region_margin_lp",
    "MAX_SUBSET_ENTITIES",
]

MAX_SUBSET_ENTITIES = 20
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class FeasibilityReport:
    """Verdict plus the tightest subset.

    ``slack`` is ``min_Q (sum_{N_Q} b - sum_Q a)`` over non-empty ``Q`` for the
    subset route. The max-flow route reports ``max_flow - sum(a)``, which is the
    same number when negative and 0 otherwise.
    """

    sustainable: bool
    violating_subset: Optional[frozenset]
    slack: float

    def __post_init__(self):
        if self.sustainable != (self.violating_subset is None):
            raise ValueError("violating_subset must be present exactly when unsustainable")


@dataclass
class StationaryPolicy:
    """State-independent randomized policy.

    ``rho[(j, i, k)]``: probability producer ``j`` serves consumer ``i`` in
    commodity ``k``; ``zeta[(j, p)]``: probability ``j`` runs plan ``p``.
    """

    rho: dict = field(default_factory=dict)
    zeta: dict = field(default_factory=dict)

    def rho_array(self, n_entities: int, n_commodities: int = 1) -> np.ndarray:
        out = np.zeros((n_entities, n_entities, n_commodities))
        for (j, i, k), v in self.rho.items():
            out[j, i, k] = v
        return out

    def validate(self, tol: float = 1e-9) -> None:
        rows: dict = {}
        for (j, i, k), v in self.rho.items():
            if not -tol <= v <= 1 + tol:
                raise ValueError(f"rho{(j, i, k)}={v} outside [0, 1]")
            rows[(j, k)] = rows.get((j, k), 0.0) + v
        for key, total in rows.items():
            if total > 1 + tol:
                raise ValueError(f"rho row {key} sums to {total} > 1")
        plans: dict = {}
        for (j, p), v in self.zeta.items():
            if not -tol <= v <= 1 + tol:
                raise ValueError(f"zeta{(j, p)}={v} outside [0, 1]")
            plans[j] = plans.get(j, 0.0) + v
        for j, total in plans.items():
            if total > 1 + tol:
                raise ValueError(f"zeta of entity {j} sums to {total} > 1")


def _as_means(graph: ExchangeGraph, a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n = graph.n_entities
    if a.shape != (n,) or b.shape != (n,):
        raise ValueError(f"a and b must have length {n}")
    if (a < 0).any() or (b < 0).any() or not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("a and b must be finite and non-negative")
    return a, b


def _subset_tables(values: np.ndarray) -> np.ndarray:
    """``out[mask] = sum(values[i] for i in mask)`` for every bitmask."""
    out = np.zeros(1)
    for v in values:
        out = np.concatenate([out, out + v])
    return out


def check_sustainability_1c(graph: ExchangeGraph, a, b) -> FeasibilityReport:
    """Exhaustive subset test, ``O(2^N)``; limited to ``N <= 20``."""
    a, b = _as_means(graph, a, b)
    n = graph.n_entities
    if n > MAX_SUBSET_ENTITIES:
        raise SizeError(
            f"subset enumeration is capped at N={MAX_SUBSET_ENTITIES}; "
            "use check_sustainability_maxflow for larger economies"
        )
    sum_a = _subset_tables(a)
    sum_b = _subset_tables(b)
    nbr = np.zeros(1, dtype=np.int64)
    for i in range(n):
        mask_i = 0
        for j in graph.in_neighbors[i]:
            mask_i |= 1 << j
        nbr = np.concatenate([nbr, nbr | mask_i])
    slack = sum_b[nbr] - sum_a
    worst = 1 + int(np.argmin(slack[1:]))
    worst_slack = float(slack[worst])
    if worst_slack >= -SLACK_TOL:
        return FeasibilityReport(True, None, worst_slack)
    subset = frozenset(i for i in range(n) if worst >> i & 1)
    return FeasibilityReport(False, subset, worst_slack)


def check_sustainability_maxflow(graph: ExchangeGraph, a, b) -> FeasibilityReport:
    a, b = _as_means(graph, a, b)
    net = build_maxflow_network(graph, a, b)
    res = max_flow(net)
    deficit = res.value - float(a.sum())
    if deficit >= -FLOW_EPS * max(1, graph.n_entities):
        return FeasibilityReport(True, None, min(deficit, 0.0))
    n = graph.n_entities
    # consumers on the source side whose producers all sit on the source side too
    q = frozenset(
        i
        for i in range(n)
        if 1 + i in res.source_side
        and all(1 + n + j in res.source_side for j in graph.in_neighbors[i])
    )
    slack = float(sum(b[j] for j in graph.producers_of(q)) - sum(a[i] for i in q))
    return FeasibilityReport(False, q, slack)


def interior_margin_1c(graph: ExchangeGraph, a, b, tol: float = 1e-12) -> float:
    """Largest ``eps`` with ``a + eps`` (every entry raised) still sustainable.

    Bisection over the max-flow verdict.
    """
    a, b = _as_means(graph, a, b)
    report = check_sustainability_maxflow(graph, a, b)
    if not report.sustainable:
        raise InfeasibleError("demand vector lies outside the sustainability region", report)
    lo, hi = 0.0, float(b.sum()) + 1.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if check_sustainability_maxflow(graph, a + mid, b).sustainable:
            lo = mid
        else:
            hi = mid
    return lo


def stationary_policy_1c(graph: ExchangeGraph, a, b, boost: Optional[float] = None) -> StationaryPolicy:
    """Randomized routing derived from a max flow.

    Consumer demands are raised by ``boost`` (default: the full interior
    margin) before routing, so every consumer receives strictly more service
    than it requests whenever ``a`` is interior. ``rho[j, i] = f(i -> j) / b[j]``.
    """
    a, b = _as_means(graph, a, b)
    report = check_sustainability_maxflow(graph, a, b)
    if not report.sustainable:
        raise InfeasibleError("cannot build a stationary policy for unsustainable demand", report)
    if boost is None:
        boost = interior_margin_1c(graph, a, b)
    target = a + boost
    net = build_maxflow_network(graph, target, b)
    res = max_flow(net)
    n = graph.n_entities
    rho = {}
    for e, (u, v, _) in enumerate(net.arcs):
        if 1 <= u <= n and n + 1 <= v <= 2 * n:
            i, j = u - 1, v - n - 1
            if b[j] > 0 and res.flows[e] > 0:
                rho[(j, i, 0)] = min(1.0, float(res.flows[e] / b[j]))
    # normalise rows that overshoot 1 by rounding
    for j in range(n):
        row = [key for key in rho if key[0] == j]
        total = sum(rho[key] for key in row)
        if total > 1.0:
            for key in row:
                rho[key] /= total
    return StationaryPolicy(rho=rho, zeta={(j, 0): 1.0 for j in range(n)})


# -- several commodities -----------------------------------------------------


def _rate_arrays(plans) -> list:
    out = []
    for plans_j in plans:
        rows = [p.rates if isinstance(p, ProductionPlan) else p for p in plans_j]
        out.append(np.atleast_2d(np.asarray(rows, dtype=float)))
    return out


@dataclass(frozen=True)
class RegionLP:
    """Variable layout of the region LP (exposed for the bargaining benchmark)."""

    s_index: dict  # (j, i, k) -> column
    zeta_index: dict  # (j, p) -> column
    n_vars: int
    A_ub: np.ndarray
    b_ub: np.ndarray


def region_lp(graph: ExchangeGraph, plans, a, extra_cols: int = 0, demand_shift_col: Optional[int] = None) -> RegionLP:
    """Constraints of the convex-hull region in variables ``(s, zeta, extra...)``.

    Rows::

        a[i, k] + shift <= sum_{j in N_i} s[j, i, k]
        sum_{i in N_j} s[j, i, k] <= sum_p zeta[j, p] * B[j, p, k]
        sum_p zeta[j, p] <= 1

    ``demand_shift_col`` (an index among the extra columns) adds that variable
    to every demand, which turns the LP into a margin computation.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    rates = _rate_arrays(plans)
    n = graph.n_entities
    k_dim = a.shape[1]
    if a.shape[0] != n:
        a = a.reshape(n, -1)
        k_dim = a.shape[1]
    s_index = {}
    for (j, i) in sorted(graph.edges):
        for k in range(k_dim):
            s_index[(j, i, k)] = len(s_index)
    zeta_index = {}
    for j in range(n):
        for p in range(rates[j].shape[0]):
            zeta_index[(j, p)] = len(s_index) + len(zeta_index)
    n_vars = len(s_index) + len(zeta_index) + extra_cols
    rows, rhs = [], []
    for i in range(n):
        for k in range(k_dim):
            row = np.zeros(n_vars)
            for j in graph.in_neighbors[i]:
                row[s_index[(j, i, k)]] = -1.0
            if demand_shift_col is not None:
                row[len(s_index) + len(zeta_index) + demand_shift_col] = 1.0
            rows.append(row)
            rhs.append(-a[i, k])
    for j in range(n):
        for k in range(k_dim):
            row = np.zeros(n_vars)
            for i in graph.out_neighbors[j]:
                row[s_index[(j, i, k)]] = 1.0
            for p in range(rates[j].shape[0]):
                row[zeta_index[(j, p)]] = -rates[j][p, k]
            rows.append(row)
            rhs.append(0.0)
    for j in range(n):
        row = np.zeros(n_vars)
        for p in range(rates[j].shape[0]):
            row[zeta_index[(j, p)]] = 1.0
        rows.append(row)
        rhs.append(1.0)
    return RegionLP(s_index, zeta_index, n_vars, np.array(rows), np.array(rhs))


def in_production_region(graph: ExchangeGraph, plans, a, tol: float = 1e-9) -> bool:
    """Is the demand matrix ``a`` (N x K) inside the cooperative region?"""
    lp = region_lp(graph, plans, a)
    res = lp_solve(np.zeros(lp.n_vars), lp.A_ub, lp.b_ub + tol)
    return res.success


def production_region_margin_lp(graph: ExchangeGraph, plans, a) -> float:
    """Largest uniform demand increase that stays in the region, as one LP.

    Negative when ``a`` is outside the region.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    lp = region_lp(graph, plans, a, extra_cols=1, demand_shift_col=0)
    top = sum(float(r.max(initial=0.0)) for r in _rate_arrays(plans)) + float(a.max(initial=0.0)) + 1.0
    c = np.zeros(lp.n_vars)
    c[-1] = 1.0
    bounds = [(0.0, None)] * (lp.n_vars - 1) + [(-top, top)]
    res = lp_solve(c, lp.A_ub, lp.b_ub, bounds=bounds, maximize=True)
    return float(res.x[-1])


def production_region_margin(graph: ExchangeGraph, plans, a, tol: float = 1e-10) -> float:
    """Largest ``eps`` with ``a + eps`` in the cooperative region, by bisection."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if not in_production_region(graph, plans, a):
        raise InfeasibleError("demand matrix lies outside the production region")
    hi = sum(float(r.max(initial=0.0)) for r in _rate_arrays(plans)) + 1.0
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if in_production_region(graph, plans, a + mid):
            lo = mid
        else:
            hi = mid
    return lo
