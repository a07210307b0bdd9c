"""Layered flow network for single-commodity sustainability and its max flow.

The network has a source ``S``, one node per consumer, one node per producer
and a sink ``D``::

    S --a_i--> consumer i --a_i--> producer j --b_j--> D     for (j, i) in E
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..model import ExchangeGraph

__all__ = ["FlowNetwork", "MaxFlowResult", "build_maxflow_network", "max_flow", "FLOW_EPS"]

FLOW_EPS = 1e-9


@dataclass(frozen=True)
class FlowNetwork:
    labels: tuple
    arcs: tuple  # (tail, head, capacity)
    source: int
    sink: int

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    def node(self, label) -> int:
        return self.labels.index(label)

    def arc_index(self, tail_label, head_label) -> int:
        u, v = self.node(tail_label), self.node(head_label)
        for idx, (t, h, _) in enumerate(self.arcs):
            if t == u and h == v:
                return idx
        raise KeyError((tail_label, head_label))


@dataclass(frozen=True)
class MaxFlowResult:
    value: float
    flows: np.ndarray
    source_side: frozenset  # nodes reachable from S in the final residual graph


def consumer_label(i: int) -> str:
    return f"c{i}"


def producer_label(j: int) -> str:
    return f"p{j}"


def build_maxflow_network(graph: ExchangeGraph, a, b) -> FlowNetwork:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = graph.n_entities
    if a.shape != (n,) or b.shape != (n,):
        raise ValueError(f"a and b must have length {n}")
    if (a < 0).any() or (b < 0).any():
        raise ValueError("demand and production means must be non-negative")
    labels = ("S",) + tuple(consumer_label(i) for i in range(n)) + tuple(
        producer_label(j) for j in range(n)
    ) + ("D",)
    S, D = 0, 2 * n + 1
    arcs = [(S, 1 + i, float(a[i])) for i in range(n)]
    for i in range(n):
        for j in graph.in_neighbors[i]:
            arcs.append((1 + i, 1 + n + j, float(a[i])))
    arcs.extend((1 + n + j, D, float(b[j])) for j in range(n))
    return FlowNetwork(labels, tuple(arcs), S, D)


def max_flow(network: FlowNetwork, eps: float = FLOW_EPS) -> MaxFlowResult:
    """Edmonds-Karp: shortest augmenting paths on the residual graph.

    Residual capacities at or below ``eps`` count as saturated.
    """
    n_arcs = len(network.arcs)
    # residual arc 2e is forward, 2e+1 its reverse
    head = np.empty(2 * n_arcs, dtype=int)
    resid = np.empty(2 * n_arcs)
    adj = [[] for _ in range(network.n_nodes)]
    for e, (u, v, cap) in enumerate(network.arcs):
        if cap < 0:
            raise ValueError("capacities must be non-negative")
        head[2 * e], resid[2 * e] = v, cap
        head[2 * e + 1], resid[2 * e + 1] = u, 0.0
        adj[u].append(2 * e)
        adj[v].append(2 * e + 1)
    s, t = network.source, network.sink
    total = 0.0
    while True:
        parent_arc = [-1] * network.n_nodes
        seen = [False] * network.n_nodes
        seen[s] = True
        queue = deque([s])
        while queue and not seen[t]:
            u = queue.popleft()
            for r in adj[u]:
                v = head[r]
                if not seen[v] and resid[r] > eps:
                    seen[v] = True
                    parent_arc[v] = r
                    queue.append(v)
        if not seen[t]:
            break
        push = np.inf
        v = t
        while v != s:
            r = parent_arc[v]
            push = min(push, resid[r])
            v = head[r ^ 1]
        v = t
        while v != s:
            r = parent_arc[v]
            resid[r] -= push
            resid[r ^ 1] += push
            v = head[r ^ 1]
        total += push
    flows = np.array([resid[2 * e + 1] for e in range(n_arcs)])
    return MaxFlowResult(float(total), flows, frozenset(np.flatnonzero(seen).tolist()))
