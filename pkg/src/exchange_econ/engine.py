"""Slotted simulation of an exchange economy under one of the online policies.

Within a slot the order is: plan update (first slot of a period only),
allocation, service, arrivals, record. Service therefore acts on the backlog
left by the previous slot and fresh requests wait at least one slot.

At the last slot of every period the costly-plan policy computes each
entity's realized stand-alone cost, updates its cost queue and the running
mean of stand-alone costs.
"""
from __future__ import annotations

import logging
import math
from array import array
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .feasibility.sustainability import StationaryPolicy
from .model import EconomyConfig, Policy
from .policies.allocation import _active_pairs, _maxweight_pairs
from .policies.planning import (
    _alg2_choice,
    _alg3_scores,
    _first_argmax,
    _peaked_demand,
    realized_independent_cost,
    virtual_queue_update,
)

__all__ = ["MetricsTrace", "Summary", "run", "regression_slope", "BURN_IN_FRACTION"]

log = logging.getLogger(__name__)

BURN_IN_FRACTION = 0.2
CHUNK = 8192

# spawn-key namespaces for the named sub-streams
_ARRIVALS, _ROUTING, _PLANS = 1, 2, 3


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def regression_slope(y: np.ndarray) -> float:
    """Least-squares slope of ``y`` against its index."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        return 0.0
    t = np.arange(n, dtype=float)
    t -= t.mean()
    return float(t @ (y - y.mean()) / (t @ t))


@dataclass(frozen=True)
class Summary:
    time_avg_backlog: float  # after burn-in
    final_half_slope: float
    time_avg_cost: np.ndarray  # per entity, per period
    time_avg_realized_ind_cost: np.ndarray
    nash_product_mean: float  # time average of the per-period samples
    nash_product_of_means: float  # product of time-average savings
    capped_fraction: float

    def as_dict(self) -> dict:
        return {
            "time_avg_backlog": self.time_avg_backlog,
            "final_half_slope": self.final_half_slope,
            "time_avg_cost": self.time_avg_cost.tolist(),
            "time_avg_realized_ind_cost": self.time_avg_realized_ind_cost.tolist(),
            "nash_product_mean": self.nash_product_mean,
            "nash_product_of_means": self.nash_product_of_means,
            "capped_fraction": self.capped_fraction,
        }


@dataclass
class MetricsTrace:
    """Per-slot and per-period records of one run.

    Per-period arrays have one row per (possibly truncated) period. Plan
    index ``-1`` means the entity idled. Stand-alone cost columns are NaN for
    policies that do not track them.
    """

    config: EconomyConfig
    total_backlog: np.ndarray
    entity_backlog: np.ndarray
    running_avg_backlog: np.ndarray
    period_start: np.ndarray
    period_plan: np.ndarray
    period_cost: np.ndarray
    realized_ind_cost: np.ndarray
    j_bar: np.ndarray
    virtual_queue: np.ndarray
    nash_sample: np.ndarray
    capped: np.ndarray
    final_backlog: np.ndarray = field(default=None)

    @property
    def horizon(self) -> int:
        return self.total_backlog.size

    @property
    def n_periods(self) -> int:
        return self.period_start.size

    def period_of_slot(self) -> np.ndarray:
        return np.arange(self.horizon) // self.config.period_length

    def summary(self, burn_in: float = BURN_IN_FRACTION) -> Summary:
        start = int(burn_in * self.horizon)
        tail = self.total_backlog[start:] if start < self.horizon else self.total_backlog[-1:]
        half = self.total_backlog[self.horizon // 2:]
        p0 = int(burn_in * self.n_periods)
        costs = self.period_cost[p0:] if p0 < self.n_periods else self.period_cost
        real = self.realized_ind_cost[p0:] if p0 < self.n_periods else self.realized_ind_cost
        nash = self.nash_sample[p0:] if p0 < self.n_periods else self.nash_sample
        avg_cost = costs.mean(axis=0)
        avg_real = real.mean(axis=0)
        return Summary(
            time_avg_backlog=float(tail.mean()),
            final_half_slope=regression_slope(half),
            time_avg_cost=avg_cost,
            time_avg_realized_ind_cost=avg_real,
            nash_product_mean=float(nash.mean()) if nash.size else math.nan,
            nash_product_of_means=float(np.prod(avg_real - avg_cost)),
            capped_fraction=float(self.capped.mean()) if self.capped.size else 0.0,
        )


class _ArrivalFeed:
    """Chunked draws from one independent stream per (consumer, commodity).

    ``chunk`` returns ``cols[i][k]``: a list of draws, one per slot.
    """

    def __init__(self, config: EconomyConfig):
        n, k_dim = config.n_entities, config.n_commodities
        self.specs = [[config.arrivals[i][k] for k in range(k_dim)] for i in range(n)]
        self.rngs = [[_stream(config.seed, _ARRIVALS, i, k) for k in range(k_dim)] for i in range(n)]

    def chunk(self, size: int) -> list:
        return [
            [spec.sample(rng, size).tolist() for spec, rng in zip(specs, rngs)]
            for specs, rngs in zip(self.specs, self.rngs)
        ]


class _RoutingFeed:
    """Chunked draws of a stationary randomized policy.

    Per slot: one consumer per (producer, commodity), index N meaning idle,
    and one plan per producer (used only on the first slot of a period),
    index ``len(plans)`` meaning idle.
    """

    def __init__(self, config: EconomyConfig, policy: StationaryPolicy):
        n, k_dim = config.n_entities, config.n_commodities
        rho = policy.rho_array(n, k_dim)
        self.keys = [(j, k) for j in range(n) for k in range(k_dim)]
        self.cdf = [np.cumsum(rho[j, :, k]) for j, k in self.keys]
        self.rngs = [_stream(config.seed, _ROUTING, j, k) for j, k in self.keys]
        self.plan_cdf = [
            np.cumsum([policy.zeta.get((j, p), 0.0) for p in range(len(config.plans[j]))])
            for j in range(n)
        ]
        self.plan_rngs = [_stream(config.seed, _PLANS, j) for j in range(n)]

    def chunk(self, size: int):
        picks = [
            np.searchsorted(cdf, rng.random(size), side="right").tolist()
            for cdf, rng in zip(self.cdf, self.rngs)
        ]
        plans = [
            np.searchsorted(cdf, rng.random(size), side="right").tolist()
            for cdf, rng in zip(self.plan_cdf, self.plan_rngs)
        ]
        return picks, plans


def run(
    config: EconomyConfig,
    stationary: Optional[StationaryPolicy] = None,
    observer: Optional[Callable] = None,
    report_every: int = 0,
) -> MetricsTrace:
    """Simulate ``config.horizon`` slots.

    ``stationary`` replaces the max-weight allocation (and, through its
    ``zeta``, the plan choice) by a state-independent randomized policy.
    ``observer(slot, alloc, active_rates, plan)`` is called after the
    allocation of every slot when given.
    """
    config.validate()
    n, k_dim, T = config.n_entities, config.n_commodities, config.period_length
    horizon = config.horizon
    policy = config.policy
    out_nbrs = config.graph.out_neighbors
    rates = config.rate_table()
    costs = config.cost_table()
    plans = config.plans
    costly = policy is Policy.COSTLY_IC and stationary is None
    fixed_plans = policy is Policy.MAXWEIGHT_1C and stationary is None
    v_param = float(config.v_param)
    entities = range(n)
    commodities = range(k_dim)

    feed = _ArrivalFeed(config)
    if stationary is not None:
        stationary.validate()
        routing = _RoutingFeed(config, stationary)
        route_keys = routing.keys

    x = [[0.0] * k_dim for _ in entities]
    zero_rates = [0.0] * k_dim
    z = [0] * n if policy is Policy.MAXWEIGHT_1C else [None] * n
    active = [list(rates[j][z[j]]) if z[j] is not None else zero_rates for j in entities]
    pairs = _active_pairs(active)
    y = [0.0] * n
    j_bar = [0.0] * n
    n_closed = 0

    total_arr = array("d")
    entity_arr = array("d")
    running_arr = array("d")
    running = 0.0
    plan_arr = array("l")
    p_real, p_jbar, p_y, p_nash, p_capped = [], [], [], [], []
    x_start = own_arrivals = None

    cols = []
    pos = size = 0
    for t in range(horizon):
        if pos == size:
            size = min(CHUNK, horizon - t)
            cols = feed.chunk(size)
            if stationary is not None:
                route_picks, plan_picks = routing.chunk(size)
            pos = 0

        # 1. plan update on the first slot of a period
        phase = t % T
        if phase == 0 and not fixed_plans:
            if stationary is not None:
                for j in entities:
                    p = plan_picks[j][pos]
                    z[j] = p if p < len(rates[j]) else None
            elif policy is Policy.TWO_TIMESCALE:
                for j in entities:
                    z[j] = _alg2_choice(x, rates[j], out_nbrs[j])
            elif costly:
                for j in entities:
                    served = _peaked_demand(x, out_nbrs[j], k_dim)
                    scores = _alg3_scores(served, y[j], j_bar[j], rates[j], costs[j], T, v_param)
                    best = _first_argmax(scores)
                    z[j] = None if best == len(rates[j]) else best
            active = [list(rates[j][z[j]]) if z[j] is not None else zero_rates for j in entities]
            pairs = _active_pairs(active)
            plan_arr.extend([-1 if p is None else p for p in z])
            if costly:
                x_start = [row[:] for row in x]
                own_arrivals = [[0.0] * k_dim for _ in entities]

        # 2. allocation
        if stationary is None:
            alloc = _maxweight_pairs(x, pairs, out_nbrs)
        else:
            alloc = []
            for (j, k), picks in zip(route_keys, route_picks):
                i = picks[pos]
                if i < n and active[j][k] > 0.0:
                    alloc.append((j, i, k))
        if observer is not None:
            observer(t, tuple(alloc), [r[:] for r in active], tuple(z))

        # 3. service, 4. arrivals, 5. queue update
        for j, i, k in alloc:
            x[i][k] -= active[j][k]
        total = 0.0
        for i in entities:
            row = x[i]
            ci = cols[i]
            s_i = 0.0
            for k in commodities:
                v = row[k]
                v = (v if v > 0.0 else 0.0) + ci[k][pos]
                row[k] = v
                s_i += v
            entity_arr.append(s_i)
            total += s_i
        if costly:
            for i in entities:
                oa, ci = own_arrivals[i], cols[i]
                for k in commodities:
                    oa[k] += ci[k][pos]

        # 6. record
        total_arr.append(total)
        running += (total - running) / (t + 1)
        running_arr.append(running)
        pos += 1
        if report_every and (t + 1) % report_every == 0:
            log.info("slot %d: total backlog %.6g, running average %.6g", t + 1, total, running)

        if costly and (phase == T - 1 or t == horizon - 1):
            length = phase + 1
            cost_now = [costs[j][z[j]] if z[j] is not None else 0.0 for j in entities]
            realized = []
            capped = []
            for j in entities:
                demand = [x_start[j][k] + own_arrivals[j][k] for k in commodities]
                rc = realized_independent_cost(demand, plans[j], length)
                realized.append(rc.value)
                capped.append(rc.capped)
                y[j] = virtual_queue_update(y[j], rc.value, cost_now[j])
            n_closed += 1
            for j in entities:
                j_bar[j] += (realized[j] - j_bar[j]) / n_closed
            p_real.append(realized)
            p_capped.append(capped)
            p_jbar.append(j_bar[:])
            p_y.append(y[:])
            p_nash.append(math.prod(j_bar[j] - cost_now[j] for j in entities))

    n_periods = -(-horizon // T)
    period_start = np.arange(n_periods) * T
    if fixed_plans:
        period_plan = np.zeros((n_periods, n), dtype=int)
    else:
        period_plan = np.frombuffer(plan_arr, dtype=np.int_).reshape(n_periods, n).copy()
    cost_lookup = [np.array(c + [0.0]) for c in costs]  # index -1 -> idle cost 0
    period_cost = np.column_stack([cost_lookup[j][period_plan[:, j]] for j in entities])
    if costly:
        extra = dict(
            realized_ind_cost=np.array(p_real, dtype=float).reshape(-1, n),
            j_bar=np.array(p_jbar, dtype=float).reshape(-1, n),
            virtual_queue=np.array(p_y, dtype=float).reshape(-1, n),
            nash_sample=np.array(p_nash, dtype=float),
            capped=np.array(p_capped, dtype=bool).reshape(-1, n),
        )
    else:
        nan = np.full((n_periods, n), math.nan)
        extra = dict(
            realized_ind_cost=nan,
            j_bar=nan.copy(),
            virtual_queue=np.zeros((n_periods, n)),
            nash_sample=np.full(n_periods, math.nan),
            capped=np.zeros((n_periods, n), dtype=bool),
        )
    return MetricsTrace(
        config=config,
        total_backlog=np.frombuffer(total_arr, dtype=float).copy(),
        entity_backlog=np.frombuffer(entity_arr, dtype=float).reshape(horizon, n).copy(),
        running_avg_backlog=np.frombuffer(running_arr, dtype=float).copy(),
        period_start=period_start,
        period_plan=period_plan,
        period_cost=period_cost,
        final_backlog=np.array(x),
        **extra,
    )


# the bounds live in their own module; re-exported here because they are
# evaluated against the simulator's time averages
from .bounds import Theorem3Bounds, theorem1_bound, theorem2_bound, theorem3_bounds  # noqa: E402

__all__ += ["theorem1_bound", "theorem2_bound", "theorem3_bounds", "Theorem3Bounds"]
