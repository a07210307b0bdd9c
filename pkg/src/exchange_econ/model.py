"""Core domain types and the queue dynamics shared by every policy.

Entities are indexed ``0..N-1`` and commodities ``0..K-1``. An edge ``(j, i)``
means producer ``j`` may ship resources to consumer ``i``; every entity can
always serve itself, so self-loops are part of every graph.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigurationError, InvalidArgumentError, InvalidDecisionError

__all__ = [
    "ExchangeGraph",
    "ArrivalKind",
    "ArrivalSpec",
    "ProductionPlan",
    "Policy",
    "EconomyConfig",
    "SimState",
    "PolicyDecision",
    "queue_update",
    "received_service",
    "sample_arrivals",
]


@dataclass(frozen=True)
class ExchangeGraph:
    """Directed exchange graph; ``(j, i)`` in ``edges`` lets ``j`` serve ``i``."""

    n_entities: int
    edges: frozenset

    def __post_init__(self):
        if not isinstance(self.n_entities, (int, np.integer)) or self.n_entities < 1:
            raise ConfigurationError(f"n_entities must be a positive integer, got {self.n_entities!r}")
        edges = frozenset((int(j), int(i)) for j, i in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.n_entities
        for j, i in edges:
            if not (0 <= j < n and 0 <= i < n):
                raise ConfigurationError(f"edge {(j, i)} has an endpoint outside [0, {n})")
        missing = [i for i in range(n) if (i, i) not in edges]
        if missing:
            raise ConfigurationError(f"self-loops missing for entities {missing}")

    @classmethod
    def from_edges(cls, n_entities: int, edges: Iterable[Sequence[int]]) -> "ExchangeGraph":
        """Build a graph from ``edges``, adding the mandatory self-loops."""
        es = {(int(j), int(i)) for j, i in edges}
        es.update((i, i) for i in range(n_entities))
        return cls(n_entities, frozenset(es))

    @classmethod
    def complete(cls, n_entities: int) -> "ExchangeGraph":
        return cls.from_edges(n_entities, [(j, i) for j in range(n_entities) for i in range(n_entities)])

    @classmethod
    def self_loops(cls, n_entities: int) -> "ExchangeGraph":
        return cls.from_edges(n_entities, [])

    @cached_property
    def out_neighbors(self) -> tuple:
        """``out_neighbors[j]``: consumers producer ``j`` may serve, ascending."""
        return tuple(
            tuple(sorted(i for (jj, i) in self.edges if jj == j)) for j in range(self.n_entities)
        )

    @cached_property
    def in_neighbors(self) -> tuple:
        """``in_neighbors[i]``: producers that may serve consumer ``i``, ascending."""
        return tuple(
            tuple(sorted(j for (j, ii) in self.edges if ii == i)) for i in range(self.n_entities)
        )

    @property
    def in_degree(self) -> np.ndarray:
        return np.array([len(p) for p in self.in_neighbors], dtype=int)

    def producers_of(self, consumers: Iterable[int]) -> frozenset:
        """Producers able to serve at least one consumer in ``consumers``."""
        out = set()
        for i in consumers:
            out.update(self.in_neighbors[i])
        return frozenset(out)


class ArrivalKind(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    BERNOULLI_BATCH = "bernoulli-batch"
    TRUNCATED_POISSON = "truncated-poisson"


def _truncated_poisson_pmf(lam: float, top: int) -> np.ndarray:
    ks = np.arange(top + 1)
    logw = ks * math.log(lam) - np.array([math.lgamma(k + 1) for k in ks])
    w = np.exp(logw - logw.max())
    return w / w.sum()


@dataclass(frozen=True)
class ArrivalSpec:
    """Distribution of the per-slot request count of one (consumer, commodity) pair.

    ``bernoulli-batch`` emits a batch of ``a_max`` requests with probability
    ``mean / a_max``. ``truncated-poisson`` draws from a Poisson law conditioned
    on ``<= floor(a_max)`` whose rate is tuned so the conditional mean is ``mean``.
    """

    kind: ArrivalKind
    mean: float
    a_max: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ArrivalKind(self.kind))
        mean, a_max = float(self.mean), float(self.a_max)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "a_max", a_max)
        if not (math.isfinite(mean) and math.isfinite(a_max)):
            raise ConfigurationError("arrival mean and a_max must be finite")
        if a_max <= 0:
            raise ConfigurationError(f"a_max must be positive, got {a_max}")
        if not 0 <= mean <= a_max:
            raise ConfigurationError(f"arrival mean {mean} must lie in [0, a_max={a_max}]")
        if self.kind is ArrivalKind.BERNOULLI_BATCH and a_max != math.floor(a_max):
            raise ConfigurationError("bernoulli-batch arrivals need an integral a_max (the batch size)")
        if self.kind is ArrivalKind.TRUNCATED_POISSON and 0 < mean and mean > math.floor(a_max):
            raise ConfigurationError(
                f"truncated-poisson mean {mean} exceeds the largest support point {math.floor(a_max)}"
            )

    @cached_property
    def _poisson_cdf(self) -> np.ndarray:
        top = int(math.floor(self.a_max))
        if self.mean == 0:
            pmf = np.zeros(top + 1)
            pmf[0] = 1.0
        elif self.mean >= top:
            pmf = np.zeros(top + 1)
            pmf[top] = 1.0
        else:
            def excess(log_lam):
                pmf = _truncated_poisson_pmf(math.exp(log_lam), top)
                return float(pmf @ np.arange(top + 1)) - self.mean

            log_lam = brentq(excess, -40.0, 40.0, xtol=1e-14)
            pmf = _truncated_poisson_pmf(math.exp(log_lam), top)
        cdf = np.cumsum(pmf)
        cdf[-1] = 1.0
        return cdf

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` i.i.d. request counts (float array of integral values).

        Every kind consumes exactly one uniform per draw (none for
        ``deterministic``), so the stream is independent of how draws are chunked.
        """
        if self.kind is ArrivalKind.DETERMINISTIC:
            return np.full(size, float(round(self.mean)))
        u = rng.random(size)
        if self.kind is ArrivalKind.BERNOULLI_BATCH:
            batch = self.a_max
            return np.where(u < self.mean / batch, batch, 0.0)
        idx = np.searchsorted(self._poisson_cdf, u, side="right")
        return np.minimum(idx, len(self._poisson_cdf) - 1).astype(float)


def sample_arrivals(spec: ArrivalSpec, rng: np.random.Generator) -> int:
    """Single draw from ``spec``."""
    return int(spec.sample(rng, 1)[0])


@dataclass(frozen=True)
class ProductionPlan:
    """Per-slot production ``rates`` (one per commodity) and per-period ``cost``."""

    rates: tuple
    cost: float = 0.0

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "cost", float(self.cost))
        if any(not math.isfinite(r) or r < 0 for r in rates):
            raise ConfigurationError(f"plan rates must be finite and non-negative, got {rates}")
        if not math.isfinite(self.cost) or self.cost < 0:
            raise ConfigurationError(f"plan cost must be finite and non-negative, got {self.cost}")


class Policy(str, enum.Enum):
    MAXWEIGHT_1C = "MaxWeight1C"
    TWO_TIMESCALE = "TwoTimescale"
    COSTLY_IC = "CostlyIC"


@dataclass(frozen=True)
class EconomyConfig:
    """Everything needed to simulate one economy.

    ``arrivals[i][k]`` and ``plans[j]`` are nested tuples; lists are accepted
    and frozen on construction.
    """

    graph: ExchangeGraph
    n_commodities: int
    arrivals: tuple
    plans: tuple
    period_length: int = 1
    horizon: int = 1000
    policy: Policy = Policy.MAXWEIGHT_1C
    v_param: float = 0.0
    seed: int = 0
    b_max: Optional[float] = None
    # reserved: random production around each plan's mean rates
    stochastic_production: bool = False

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        object.__setattr__(self, "arrivals", tuple(tuple(row) for row in self.arrivals))
        object.__setattr__(self, "plans", tuple(tuple(p) for p in self.plans))
        self.validate()

    def validate(self) -> None:
        n, k = self.graph.n_entities, self.n_commodities
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ConfigurationError(f"n_commodities must be >= 1, got {k!r}")
        if len(self.arrivals) != n or any(len(row) != k for row in self.arrivals):
            raise ConfigurationError(f"arrivals must be an {n}x{k} table of ArrivalSpec")
        if len(self.plans) != n:
            raise ConfigurationError(f"plans must list the plans of all {n} entities")
        for j, plans_j in enumerate(self.plans):
            if not plans_j:
                raise ConfigurationError(f"entity {j} has an empty plan set")
            for p in plans_j:
                if len(p.rates) != k:
                    raise ConfigurationError(f"entity {j}: plan rates must have length {k}")
        if self.b_max is not None:
            top = max(max(p.rates) for plans_j in self.plans for p in plans_j)
            if top > self.b_max:
                raise ConfigurationError(f"a plan rate {top} exceeds b_max={self.b_max}")
        if not isinstance(self.period_length, (int, np.integer)) or self.period_length < 1:
            raise ConfigurationError("period_length must be an integer >= 1")
        if not isinstance(self.horizon, (int, np.integer)) or self.horizon < 1:
            raise ConfigurationError("horizon must be an integer >= 1")
        if not math.isfinite(self.v_param) or self.v_param < 0:
            raise ConfigurationError("v_param must be finite and non-negative")
        if self.stochastic_production:
            raise NotImplementedError("stochastic production rates are reserved but not implemented")
        if self.policy is Policy.MAXWEIGHT_1C:
            if k != 1:
                raise ConfigurationError("MaxWeight1C needs a single commodity")
            for j, plans_j in enumerate(self.plans):
                if len(plans_j) != 1 or plans_j[0].cost != 0:
                    raise ConfigurationError(
                        f"MaxWeight1C: entity {j} needs exactly one zero-cost plan"
                    )
        if self.policy is Policy.COSTLY_IC and self.v_param <= 0:
            raise ConfigurationError("CostlyIC needs v_param > 0")

    @property
    def n_entities(self) -> int:
        return self.graph.n_entities

    @property
    def arrival_means(self) -> np.ndarray:
        return np.array([[s.mean for s in row] for row in self.arrivals], dtype=float)

    @property
    def a_max(self) -> float:
        return max(s.a_max for row in self.arrivals for s in row)

    @property
    def max_rate(self) -> float:
        """``b_max`` if given, else the largest rate of any plan."""
        if self.b_max is not None:
            return float(self.b_max)
        return max(max(p.rates) for plans_j in self.plans for p in plans_j)

    def rate_table(self) -> list:
        """``rate_table()[j][p][k]`` as nested lists."""
        return [[list(p.rates) for p in plans_j] for plans_j in self.plans]

    def cost_table(self) -> list:
        return [[p.cost for p in plans_j] for plans_j in self.plans]

    def with_(self, **changes) -> "EconomyConfig":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass
class SimState:
    x: np.ndarray
    y: np.ndarray
    z: list
    slot: int = 0

    @classmethod
    def empty(cls, n_entities: int, n_commodities: int) -> "SimState":
        return cls(
            x=np.zeros((n_entities, n_commodities)),
            y=np.zeros(n_entities),
            z=[None] * n_entities,
        )


@dataclass(frozen=True)
class PolicyDecision:
    alloc: frozenset = field(default_factory=frozenset)
    plan_choice: tuple = ()

    def validate(self, graph: ExchangeGraph) -> None:
        seen = set()
        for j, i, k in self.alloc:
            if (j, i) not in graph.edges:
                raise InvalidDecisionError(f"allocation {(j, i, k)} uses non-edge {(j, i)}")
            if (j, k) in seen:
                raise InvalidDecisionError(
                    f"producer {j} serves more than one consumer in commodity {k}"
                )
            seen.add((j, k))


def _check_scalar(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v) or v < 0:
        raise InvalidArgumentError(f"{name} must be finite and non-negative, got {v}")
    return v


def queue_update(x_prev: float, m: float, a: float) -> float:
    """One slot of backlog dynamics: serve the old backlog, then add arrivals."""
    x_prev = _check_scalar("x_prev", x_prev)
    m = _check_scalar("service", m)
    a = _check_scalar("arrivals", a)
    return max(x_prev - m, 0.0) + a


def received_service(
    state: SimState, decision: PolicyDecision, plans: Sequence, graph: ExchangeGraph
) -> np.ndarray:
    """Service matrix ``M[i, k]`` delivered by ``decision``.

    Active plans come from ``decision.plan_choice`` when it lists every
    entity, otherwise from ``state.z``.
    """
    decision.validate(graph)
    n, k_dim = state.x.shape
    z = decision.plan_choice if len(decision.plan_choice) == n else state.z
    m = np.zeros((n, k_dim))
    for j, i, k in sorted(decision.alloc):
        p = z[j]
        if p is None:
            continue
        m[i, k] += plans[j][p].rates[k]
    return m
