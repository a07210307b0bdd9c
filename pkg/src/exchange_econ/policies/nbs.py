"""Static Nash-bargaining benchmark for costly production plans.

The benchmark maximises the product of the entities' cost savings over their
stand-alone baselines, subject to serving every demand (plus a margin
``eps1``) and every entity saving at least ``eps2``.

Writing the per-edge service rate ``s[j, i, k] = rho[j, i, k] * sum_p zeta[j, p] B[j, p, k]``
turns the bilinear feasible set into a polytope in ``(s, zeta)``; the log of
the product is concave in ``zeta``, so the problem becomes a small concave
program solved with SLSQP from several feasible starts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..errors import EntityNotSelfSustainableError, RegionError
from ..feasibility.lp import lp_solve
from ..feasibility.sustainability import StationaryPolicy, region_lp
from .planning import _plan_arrays, independent_cost_lp

__all__ = ["NbsSolution", "nbs_benchmark", "check_nbs_constraints", "independent_costs"]

DEFAULT_EPS = 1e-3


@dataclass(frozen=True)
class NbsSolution:
    policy: StationaryPolicy
    h_star: float
    coop_cost: np.ndarray
    ind_cost: np.ndarray

    @property
    def savings(self) -> np.ndarray:
        return self.ind_cost - self.coop_cost


def independent_costs(plans, a) -> np.ndarray:
    """Stand-alone cost of every entity at its mean demand row."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    out = []
    for j, plans_j in enumerate(plans):
        try:
            out.append(independent_cost_lp(a[j], plans_j)[0])
        except EntityNotSelfSustainableError as exc:
            raise RegionError(
                f"entity {j} cannot serve its own demand alone, so its baseline cost is undefined",
                constraint="independent-cost",
            ) from exc
    return np.array(out)


def _build(graph, plans, a, eps1, eps2, j_ind):
    lp = region_lp(graph, plans, a + eps1)
    n_s = len(lp.s_index)
    cost_rows = []
    for j, plans_j in enumerate(plans):
        row = np.zeros(lp.n_vars)
        for p, plan in enumerate(plans_j):
            row[lp.zeta_index[(j, p)]] = plan.cost
        cost_rows.append(row)
    A = np.vstack([lp.A_ub, np.array(cost_rows)])
    b = np.concatenate([lp.b_ub, j_ind - eps2])
    bounds = [(0.0, None)] * n_s + [(0.0, 1.0)] * (lp.n_vars - n_s)
    return lp, A, b, bounds, np.array(cost_rows)


def nbs_benchmark(config, a=None, eps1: float = DEFAULT_EPS, eps2: float = DEFAULT_EPS, n_starts: int = 8, seed: int = 0) -> NbsSolution:
    """Nash-bargaining plan mix and routing for mean demand ``a`` (N x K).

    ``config`` only needs ``graph`` and ``plans``. Raises :class:`RegionError`
    naming the violated constraint family when no point is feasible.
    """
    graph, plans = config.graph, config.plans
    a = config.arrival_means if a is None else np.atleast_2d(np.asarray(a, dtype=float))
    if eps1 <= 0 or eps2 <= 0:
        raise ValueError("eps1 and eps2 must be positive")
    j_ind = independent_costs(plans, a)
    lp, A, b, bounds, cost_rows = _build(graph, plans, a, eps1, eps2, j_ind)
    n_s = len(lp.s_index)
    if not lp_solve(np.zeros(lp.n_vars), A, b, bounds=bounds).success:
        if not lp_solve(np.zeros(lp.n_vars), lp.A_ub, lp.b_ub, bounds=bounds).success:
            raise RegionError("demand plus eps1 cannot be served by any plan mix", constraint="demand")
        raise RegionError("no plan mix saves every entity at least eps2", constraint="cost")

    def neg_log_h(x):
        sav = j_ind - cost_rows @ x
        if (sav <= 0).any():
            return 1e30
        return -float(np.log(sav).sum())

    def grad(x):
        sav = np.maximum(j_ind - cost_rows @ x, 1e-300)
        return (cost_rows / sav[:, None]).sum(axis=0)

    rng = np.random.default_rng(seed)
    starts = []
    for _ in range(n_starts):
        c = np.zeros(lp.n_vars)
        c[n_s:] = rng.uniform(-1.0, 1.0, lp.n_vars - n_s)
        res = lp_solve(c, A, b, bounds=bounds)
        starts.append(res.x)
    centre = np.mean(starts, axis=0)
    starts.append(centre)

    cons = [{"type": "ineq", "fun": lambda x: b - A @ x, "jac": lambda x: -A}]
    best_x, best_val = centre, neg_log_h(centre)
    for x0 in starts:
        res = minimize(neg_log_h, x0, jac=grad, method="SLSQP", bounds=bounds, constraints=cons,
                       options={"ftol": 1e-13, "maxiter": 500})
        x = _repair(res.x, centre, A, b, bounds)
        val = neg_log_h(x)
        if val < best_val:
            best_x, best_val = x, val
    return _solution(graph, plans, lp, best_x, j_ind, cost_rows)


def _violation(x, A, b, bounds) -> float:
    lo = np.array([l for l, _ in bounds])
    hi = np.array([np.inf if h is None else h for _, h in bounds])
    return max(float((A @ x - b).max(initial=0.0)), float((lo - x).max()), float((x - hi).max()))


def _repair(x, centre, A, b, bounds):
    """Pull an (almost) feasible solver output towards a feasible point."""
    if _violation(x, A, b, bounds) <= 1e-12:
        return x
    lo_t, hi_t = 0.0, 1.0
    for _ in range(60):
        t = 0.5 * (lo_t + hi_t)
        if _violation((1 - t) * x + t * centre, A, b, bounds) <= 1e-12:
            hi_t = t
        else:
            lo_t = t
    return (1 - hi_t) * x + hi_t * centre


def _solution(graph, plans, lp, x, j_ind, cost_rows) -> NbsSolution:
    zeta = {(j, p): float(np.clip(x[col], 0.0, 1.0)) for (j, p), col in lp.zeta_index.items()}
    k_dim = len(plans[0][0].rates)
    supply = {}
    for j, plans_j in enumerate(plans):
        for k in range(k_dim):
            supply[(j, k)] = math.fsum(zeta[(j, p)] * plan.rates[k] for p, plan in enumerate(plans_j))
    rho = {}
    for (j, i, k), col in lp.s_index.items():
        s = max(float(x[col]), 0.0)
        if s > 0 and supply[(j, k)] > 0:
            rho[(j, i, k)] = min(1.0, s / supply[(j, k)])
    # near-zero supplies turn solver round-off into rows summing above 1
    for j in range(len(plans)):
        for k in range(k_dim):
            row = [key for key in rho if key[0] == j and key[2] == k]
            total = math.fsum(rho[key] for key in row)
            if total > 1.0:
                for key in row:
                    rho[key] /= total
    coop = cost_rows @ x
    h = float(np.prod(j_ind - coop))
    return NbsSolution(StationaryPolicy(rho=rho, zeta=zeta), max(h, 0.0), coop, j_ind)


def check_nbs_constraints(solution: NbsSolution, graph, plans, a, eps1: float = DEFAULT_EPS,
                          eps2: float = DEFAULT_EPS, tol: float = 1e-9) -> list:
    """Every bargaining constraint evaluated on ``(rho, zeta)``; returns the violations."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n, k_dim = a.shape
    rho, zeta = solution.policy.rho, solution.policy.zeta
    bad = []
    for (j, i, k), v in rho.items():
        if (j, i) not in graph.edges:
            bad.append(f"rho{(j, i, k)} uses a non-edge")
        if not -tol <= v <= 1 + tol:
            bad.append(f"rho{(j, i, k)}={v} outside [0, 1]")
    for (j, p), v in zeta.items():
        if not -tol <= v <= 1 + tol:
            bad.append(f"zeta{(j, p)}={v} outside [0, 1]")
    for i in range(n):
        for k in range(k_dim):
            served = math.fsum(
                rho.get((j, i, k), 0.0)
                * math.fsum(zeta[(j, p)] * plan.rates[k] for p, plan in enumerate(plans[j]))
                for j in graph.in_neighbors[i]
            )
            if a[i, k] + eps1 > served + tol:
                bad.append(f"demand ({i}, {k}): {a[i, k]} + eps1 > served {served}")
    for j in range(n):
        for k in range(k_dim):
            total = math.fsum(rho.get((j, i, k), 0.0) for i in graph.out_neighbors[j])
            if total > 1 + tol:
                bad.append(f"rho row ({j}, {k}) sums to {total}")
        cost = math.fsum(zeta[(j, p)] * plan.cost for p, plan in enumerate(plans[j]))
        if cost + eps2 > solution.ind_cost[j] + tol:
            bad.append(f"entity {j}: cost {cost} + eps2 > independent cost {solution.ind_cost[j]}")
        zsum = math.fsum(zeta[(j, p)] for p in range(len(plans[j])))
        if zsum > 1 + tol:
            bad.append(f"zeta of entity {j} sums to {zsum}")
    return bad
