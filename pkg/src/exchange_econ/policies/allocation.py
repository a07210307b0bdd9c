"""Per-slot service allocation: distributed max-weight and its centralised twin."""
from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import SizeError
from ..model import ExchangeGraph

__all__ = ["allocation_weight", "maxweight_allocate", "centralized_maxweight", "MAX_ENUMERATION"]

MAX_ENUMERATION = 10**6


def allocation_weight(x, rates, alloc) -> float:
    """``sum X[i, k] * B[j, k]`` over the allocation, correctly rounded."""
    x = np.asarray(x, dtype=float)
    rates = np.asarray(rates, dtype=float)
    return math.fsum(float(x[i, k]) * float(rates[j, k]) for j, i, k in alloc)


def _active_pairs(rates: list) -> list:
    """Per producer, the ``(k, rate)`` pairs with a positive rate."""
    return [[(k, r) for k, r in enumerate(rj) if r > 0.0] for rj in rates]


def _maxweight_pairs(x: list, pairs: list, out_neighbors) -> list:
    """Core of the distributed rule on nested lists; used by the simulator's slot loop.

    Each producer, per commodity, serves the neighbour with the largest
    ``X[i][k] * B[j][k]``; lowest index wins ties and zero weight means idle.
    """
    alloc = []
    for j, nbrs in enumerate(out_neighbors):
        for k, r in pairs[j]:
            best = -1
            best_w = 0.0
            for i in nbrs:
                w = x[i][k] * r
                if w > best_w:
                    best, best_w = i, w
            if best >= 0:
                alloc.append((j, best, k))
    return alloc


def _maxweight_lists(x: list, rates: list, out_neighbors) -> list:
    return _maxweight_pairs(x, _active_pairs(rates), out_neighbors)


def maxweight_allocate(x, rates, graph: ExchangeGraph) -> frozenset:
    """Distributed max-weight allocation.

    ``x`` is the N x K backlog matrix and ``rates[j][k]`` the active production
    rate of producer ``j`` (zero when idle). Returns triples ``(j, i, k)``.
    """
    x = np.asarray(x, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if (x < 0).any():
        raise ValueError("backlogs must be non-negative")
    return frozenset(_maxweight_lists(x.tolist(), rates.tolist(), graph.out_neighbors))


def centralized_maxweight(x, rates, graph: ExchangeGraph, limit: int = MAX_ENUMERATION) -> frozenset:
    """Exact maximiser of the total weight over every feasible control matrix.

    Enumerates one choice (a neighbour or idle) per producer and commodity.
    Among maximisers it drops zero-weight triples and prefers the lowest
    consumer index producer by producer, matching :func:`maxweight_allocate`.
    """
    x = np.asarray(x, dtype=float)
    rates = np.asarray(rates, dtype=float)
    n, k_dim = x.shape
    slots = [(j, k) for j in range(n) for k in range(k_dim)]
    options = [graph.out_neighbors[j] + (None,) for j, _ in slots]
    size = math.prod(len(o) for o in options)
    if size > limit:
        raise SizeError(f"{size} allocations exceed the enumeration limit {limit}")
    products = [[float(x[i, k]) * float(rates[j, k]) for i in range(n)] for j, k in slots]
    best_w = -1.0
    best_key = None
    for choice in itertools.product(*options):
        terms = [products[s][i] for s, i in enumerate(choice) if i is not None]
        w = math.fsum(terms)
        if w < best_w:
            continue
        kept = tuple(
            i if (i is not None and products[s][i] > 0.0) else n for s, i in enumerate(choice)
        )
        if w > best_w or kept < best_key:
            best_w, best_key = w, kept
    alloc = frozenset(
        (j, i, k) for (j, k), i in zip(slots, best_key) if i != n
    )
    if best_w <= 0.0:
        return frozenset()
    return alloc
