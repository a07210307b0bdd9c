"""Brute-force reference routines.

Exponential by design and only meant for cross-checking the fast paths on
small instances (the test-suite and ``exchange-econ verify``). Nothing here is
imported by the simulator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import RegionError, SizeError
from .model import ExchangeGraph

__all__ = [
    "enumerate_allocations",
    "enumerate_subsets",
    "vertex_enumeration_lp",
    "grid_search_nbs",
    "GridNbsResult",
]


def enumerate_allocations(x, rates, graph: ExchangeGraph, limit: int = 10**6):
    """Best weight and every maximising allocation.

    Each producer and commodity independently picks one out-neighbour or
    idles; all combinations are scored. Scores are summed in bulk first and
    the near-best candidates re-scored with exact summation.
    """
    x = np.asarray(x, dtype=float)
    rates = np.asarray(rates, dtype=float)
    n, k_dim = x.shape
    slots = [(j, k) for j in range(n) for k in range(k_dim)]
    options = [graph.out_neighbors[j] + (None,) for j, _ in slots]
    shape = tuple(len(o) for o in options)
    if math.prod(shape) > limit:
        raise SizeError("too many allocations to enumerate")
    total = np.zeros(1)
    for (j, k), opts in zip(slots, options):
        w = np.array([0.0 if i is None else x[i, k] * rates[j, k] for i in opts])
        total = (total[:, None] + w[None, :]).ravel()
    top = float(total.max())
    close = np.flatnonzero(total >= top - 1e-9 * max(1.0, abs(top)))
    best, argmax = -math.inf, []
    for idx in close:
        choice = np.unravel_index(int(idx), shape)
        alloc = frozenset(
            (j, opts[c], k) for (j, k), opts, c in zip(slots, options, choice) if opts[c] is not None
        )
        w = math.fsum(float(x[i, k]) * float(rates[j, k]) for j, i, k in alloc)
        if w > best:
            best, argmax = w, [alloc]
        elif w == best:
            argmax.append(alloc)
    return best, argmax


def enumerate_subsets(graph: ExchangeGraph, a, b):
    """Worst non-empty consumer subset and its slack ``sum_{N_Q} b - sum_Q a``."""
    n = graph.n_entities
    if n > 20:
        raise SizeError("subset enumeration is limited to 20 entities")
    worst_q, worst = None, math.inf
    for r in range(1, n + 1):
        for q in itertools.combinations(range(n), r):
            producers = set()
            for i in q:
                producers.update(j for (j, ii) in graph.edges if ii == i)
            slack = math.fsum(b[j] for j in producers) - math.fsum(a[i] for i in q)
            if slack < worst:
                worst_q, worst = frozenset(q), slack
    return worst_q, worst


def vertex_enumeration_lp(c, A_ub, b_ub, lower=None, upper=None, tol: float = 1e-9):
    """Minimise ``c @ x`` over a bounded polytope by visiting every vertex.

    Returns ``(value, x)`` or ``None`` when infeasible. Only sensible for a
    handful of variables.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    rows = [np.asarray(r, dtype=float) for r in np.atleast_2d(A_ub)] if A_ub is not None else []
    rhs = list(np.asarray(b_ub, dtype=float)) if b_ub is not None else []
    lower = np.zeros(n) if lower is None else np.asarray(lower, dtype=float)
    for v in range(n):
        e = np.zeros(n)
        e[v] = -1.0
        rows.append(e)
        rhs.append(-lower[v])
        if upper is not None:
            rows.append(-e)
            rhs.append(float(upper[v]))
    G, h = np.array(rows), np.array(rhs)
    best = None
    for active in itertools.combinations(range(len(G)), n):
        sub = G[list(active)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(active)])
        if (G @ x <= h + tol).all():
            val = float(c @ x)
            if best is None or val < best[0] - 1e-12:
                best = (val, x)
    return best


def _oracle_independent_cost(plans_j, a_j) -> float:
    rates = np.array([p.rates for p in plans_j], dtype=float)
    costs = np.array([p.cost for p in plans_j], dtype=float)
    n_p = len(plans_j)
    A = np.vstack([-rates.T, np.ones((1, n_p))])
    b = np.concatenate([-np.asarray(a_j, dtype=float), [1.0]])
    out = vertex_enumeration_lp(costs, A, b, upper=np.ones(n_p))
    if out is None:
        raise RegionError("entity cannot serve its own demand", constraint="independent-cost")
    return out[0]


@dataclass(frozen=True)
class GridNbsResult:
    h_star: float
    zeta: tuple  # best plan mix, one tuple per entity
    n_feasible: int


def _simplex_lattice(n_plans: int, resolution: float) -> np.ndarray:
    steps = int(round(1.0 / resolution))
    pts = [c for c in itertools.product(range(steps + 1), repeat=n_plans) if sum(c) <= steps]
    return np.array(pts, dtype=float) / steps


def grid_search_nbs(config, a, resolution: float = 0.02, eps1: float = 1e-3, eps2: float = 1e-3) -> GridNbsResult:
    """Exhaustive lattice search of the bargaining problem for tiny economies.

    Plan probabilities run over a lattice of the given resolution. For each
    lattice point, routing feasibility is decided exactly through Hall's
    condition on the bipartite producer/consumer graph (one commodity at a
    time), so no routing lattice is needed.
    """
    graph, plans = config.graph, config.plans
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n, k_dim = a.shape
    if n > 2 or k_dim > 2 or any(len(p) > 2 for p in plans):
        raise SizeError("grid search supports N <= 2, K <= 2 and at most 2 plans per entity")
    if resolution < 0.02 - 1e-12:
        raise SizeError("resolution finer than 0.02 is not supported")
    j_ind = [_oracle_independent_cost(plans[j], a[j]) for j in range(n)]
    lattices = [_simplex_lattice(len(plans[j]), resolution) for j in range(n)]
    # per entity: cost filter, then its supply per commodity
    per_entity = []
    for j in range(n):
        lat = lattices[j]
        costs = lat @ np.array([p.cost for p in plans[j]])
        keep = costs + eps2 <= j_ind[j] + 1e-12
        rates = np.array([p.rates for p in plans[j]])
        per_entity.append((lat[keep], costs[keep], lat[keep] @ rates))
    if any(len(pe[0]) == 0 for pe in per_entity):
        raise RegionError("no lattice point saves every entity eps2", constraint="cost")
    # broadcast across entities: axis j holds entity j's lattice
    shape = [len(pe[0]) for pe in per_entity]
    supply = []
    for j in range(n):
        view = [1] * n
        view[j] = shape[j]
        supply.append(per_entity[j][2].reshape(*view, k_dim))
    feasible = np.ones(shape, dtype=bool)
    for k in range(k_dim):
        for r in range(1, n + 1):
            for q in itertools.combinations(range(n), r):
                producers = set()
                for i in q:
                    producers.update(j for (j, ii) in graph.edges if ii == i)
                need = sum(a[i, k] + eps1 for i in q)
                have = sum(supply[j][..., k] for j in producers)
                feasible &= have + 1e-12 >= need
    if not feasible.any():
        raise RegionError("no lattice point serves every demand plus eps1", constraint="demand")
    product = np.ones(shape)
    for j in range(n):
        view = [1] * n
        view[j] = shape[j]
        product = product * (j_ind[j] - per_entity[j][1]).reshape(view)
    product = np.where(feasible, product, -np.inf)
    flat = int(np.argmax(product))
    idx = np.unravel_index(flat, shape)
    zeta = tuple(tuple(per_entity[j][0][idx[j]]) for j in range(n))
    return GridNbsResult(float(product[idx]), zeta, int(feasible.sum()))
