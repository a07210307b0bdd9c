"""Self-checks run by ``exchange-econ verify`` on a scenario's instance family.

Each check draws random instances around the scenario (same graph and plans,
perturbed backlogs and demands), compares a fast routine with its brute-force
counterpart or asserts an invariant, and reports a one-line verdict.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .engine import run
from .errors import EntityNotSelfSustainableError, InfeasibleError, RegionError, SizeError
from .feasibility import (
    check_sustainability_1c,
    check_sustainability_maxflow,
    in_production_region,
    production_region_margin_lp,
    stationary_policy_1c,
)
from .model import Policy, queue_update
from .oracle import enumerate_allocations, enumerate_subsets, grid_search_nbs, vertex_enumeration_lp
from .policies import (
    allocation_weight,
    centralized_maxweight,
    check_nbs_constraints,
    independent_cost_lp,
    maxweight_allocate,
    nbs_benchmark,
)
from .scenario import Scenario

__all__ = ["CheckResult", "run_checks", "CHECKS"]

N_INSTANCES = 200
DETERMINISM_HORIZON = 5000
ENUMERATION_LIMIT = 10**5


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _rng(scenario: Scenario, salt: int) -> np.random.Generator:
    return np.random.default_rng([scenario.config.seed, salt])


def _random_active_rates(cfg, rng) -> np.ndarray:
    out = np.zeros((cfg.n_entities, cfg.n_commodities))
    for j, plans_j in enumerate(cfg.plans):
        p = int(rng.integers(len(plans_j) + 1))
        if p < len(plans_j):
            out[j] = plans_j[p].rates
    return out


def check_allocation_argmax(scenario: Scenario) -> CheckResult:
    cfg = scenario.config
    rng = _rng(scenario, 1)
    graph = cfg.graph
    n_opts = math.prod(len(graph.out_neighbors[j]) + 1 for j in range(cfg.n_entities)) ** cfg.n_commodities
    use_enum = n_opts <= ENUMERATION_LIMIT
    for _ in range(N_INSTANCES):
        # small integer backlogs make exact ties common
        x = rng.integers(0, 4, size=(cfg.n_entities, cfg.n_commodities)).astype(float)
        rates = _random_active_rates(cfg, rng)
        w_fast = allocation_weight(x, rates, maxweight_allocate(x, rates, graph))
        w_central = allocation_weight(x, rates, centralized_maxweight(x, rates, graph))
        if w_fast != w_central:
            return CheckResult("allocation-argmax", False, f"distributed {w_fast} != centralized {w_central}")
        if use_enum:
            best, _ = enumerate_allocations(x, rates, graph)
            if w_fast != max(best, 0.0):
                return CheckResult("allocation-argmax", False, f"distributed {w_fast} != enumeration {best}")
    how = "enumeration and centralized" if use_enum else "centralized (enumeration too large)"
    return CheckResult("allocation-argmax", True, f"{N_INSTANCES} instances agree with {how}")


def check_queue_update(scenario: Scenario) -> CheckResult:
    rng = _rng(scenario, 2)
    top = 2.0 * max(scenario.config.a_max, scenario.config.max_rate)
    for _ in range(1000):
        x, m, m2, a = rng.uniform(0, top, 4)
        q = queue_update(x, m, a)
        if q < 0 or q < a:
            return CheckResult("queue-update", False, f"negative or below arrivals at {(x, m, a)}")
        if abs(q - queue_update(x, m2, a)) > abs(m - m2) + 1e-12:
            return CheckResult("queue-update", False, f"not 1-Lipschitz in service at {(x, m, m2, a)}")
        if queue_update(x + 1.0, m, a) < q or queue_update(x, m + 1.0, a) > q:
            return CheckResult("queue-update", False, f"not monotone at {(x, m, a)}")
    return CheckResult("queue-update", True, "1000 random updates respect the invariants")


def _single_rates(cfg):
    if cfg.n_commodities != 1 or any(len(p) != 1 for p in cfg.plans):
        return None
    return np.array([p[0].rates[0] for p in cfg.plans])


def check_subsets_vs_maxflow(scenario: Scenario) -> CheckResult:
    cfg = scenario.config
    b = _single_rates(cfg)
    if b is None:
        return CheckResult("subsets-vs-maxflow", True, "skipped: needs one commodity and one plan per entity")
    if cfg.n_entities > 12:
        return CheckResult("subsets-vs-maxflow", True, "skipped: more than 12 entities")
    rng = _rng(scenario, 3)
    base = cfg.arrival_means[:, 0]
    for _ in range(N_INSTANCES):
        a = np.maximum(base * rng.uniform(0.5, 1.5, base.size), 0.0)
        q, slack = enumerate_subsets(cfg.graph, a, b)
        fast = check_sustainability_maxflow(cfg.graph, a, b)
        dp = check_sustainability_1c(cfg.graph, a, b)
        if fast.sustainable != (slack >= -1e-9) or dp.sustainable != fast.sustainable:
            return CheckResult("subsets-vs-maxflow", False, f"verdicts differ at a={a.tolist()}")
    return CheckResult("subsets-vs-maxflow", True, f"{N_INSTANCES} perturbed demands agree")


def check_independent_lp(scenario: Scenario) -> CheckResult:
    cfg = scenario.config
    a = cfg.arrival_means
    done = 0
    for j, plans_j in enumerate(cfg.plans):
        if len(plans_j) > 8:
            continue
        rates = np.array([p.rates for p in plans_j])
        costs = np.array([p.cost for p in plans_j])
        A = np.vstack([-rates.T, np.ones((1, len(plans_j)))])
        b = np.concatenate([-a[j], [1.0]])
        oracle = vertex_enumeration_lp(costs, A, b, upper=np.ones(len(plans_j)))
        try:
            cost, _ = independent_cost_lp(a[j], plans_j)
        except EntityNotSelfSustainableError:
            if oracle is not None:
                return CheckResult("independent-cost-lp", False, f"entity {j}: LP infeasible but oracle found {oracle[0]}")
            continue
        if oracle is None or abs(oracle[0] - cost) > 1e-7:
            return CheckResult("independent-cost-lp", False, f"entity {j}: LP {cost} vs oracle {oracle}")
        done += 1
    return CheckResult("independent-cost-lp", True, f"{done} entities match vertex enumeration")


def check_nbs(scenario: Scenario) -> CheckResult:
    cfg, exp = scenario.config, scenario.experiment
    if cfg.policy is not Policy.COSTLY_IC and not exp.nbs_benchmark:
        return CheckResult("nbs-vs-grid", True, "skipped: no costly plans")
    a = cfg.arrival_means
    try:
        sol = nbs_benchmark(cfg, a, eps1=exp.eps1, eps2=exp.eps2)
    except RegionError as exc:
        return CheckResult("nbs-vs-grid", not exp.nbs_benchmark, f"benchmark infeasible ({exc.constraint})")
    bad = check_nbs_constraints(sol, cfg.graph, cfg.plans, a, exp.eps1, exp.eps2)
    if bad:
        return CheckResult("nbs-vs-grid", False, "; ".join(bad[:3]))
    try:
        grid = grid_search_nbs(cfg, a, eps1=exp.eps1, eps2=exp.eps2)
    except SizeError:
        return CheckResult("nbs-vs-grid", True, f"constraints hold, H*={sol.h_star:.6g} (too large for the grid)")
    except RegionError:
        return CheckResult("nbs-vs-grid", True, f"constraints hold, H*={sol.h_star:.6g}; grid has no feasible point")
    ok = grid.h_star <= sol.h_star + 1e-6
    return CheckResult("nbs-vs-grid", ok, f"solver H*={sol.h_star:.6g}, grid H*={grid.h_star:.6g}")


def check_stability_expectation(scenario: Scenario) -> CheckResult:
    cfg, exp = scenario.config, scenario.experiment
    if exp.expect_stable is None:
        return CheckResult("stability-expectation", True, "skipped: scenario makes no stability claim")
    margin = production_region_margin_lp(cfg.graph, cfg.plans, cfg.arrival_means)
    interior = margin > 1e-9
    ok = interior == exp.expect_stable
    claim = "stable" if exp.expect_stable else "unstable"
    return CheckResult("stability-expectation", ok, f"expected {claim}, demand margin {margin:.6g}")


def check_stationary_policy(scenario: Scenario) -> CheckResult:
    cfg = scenario.config
    b = _single_rates(cfg)
    if b is None:
        return CheckResult("stationary-policy", True, "skipped: needs one commodity and one plan per entity")
    a = cfg.arrival_means[:, 0]
    if not check_sustainability_1c(cfg.graph, a, b).sustainable:
        return CheckResult("stationary-policy", True, "skipped: demand outside the region")
    try:
        pol = stationary_policy_1c(cfg.graph, a, b)
        pol.validate()
    except (InfeasibleError, ValueError) as exc:
        return CheckResult("stationary-policy", False, str(exc))
    served = np.zeros(cfg.n_entities)
    for (j, i, _), r in pol.rho.items():
        served[i] += r * b[j]
    ok = bool((served >= a - 1e-9).all())
    return CheckResult("stationary-policy", ok, f"min service minus demand {float((served - a).min()):.6g}")


def check_determinism(scenario: Scenario) -> CheckResult:
    cfg = scenario.config.with_(horizon=min(scenario.config.horizon, DETERMINISM_HORIZON))
    t1, t2 = run(cfg), run(cfg)
    same = np.array_equal(t1.total_backlog, t2.total_backlog) and np.array_equal(t1.period_plan, t2.period_plan)
    running = np.cumsum(t1.total_backlog) / np.arange(1, cfg.horizon + 1)
    consistent = np.allclose(running, t1.running_avg_backlog, rtol=0, atol=1e-9 * max(1.0, running.max()))
    detail = f"{cfg.horizon} slots reproduced" if same else "two runs with the same seed differ"
    if same and not consistent:
        detail = "running average drifts from the recomputed trace average"
    return CheckResult("determinism", same and consistent, detail)


def check_region_membership(scenario: Scenario) -> CheckResult:
    cfg = scenario.config
    b = _single_rates(cfg)
    if b is None:
        return CheckResult("region-lp-vs-subsets", True, "skipped: needs one commodity and one plan per entity")
    rng = _rng(scenario, 4)
    base = cfg.arrival_means[:, 0]
    for _ in range(50):
        a = base * rng.uniform(0.5, 1.5, base.size)
        lp = in_production_region(cfg.graph, cfg.plans, a.reshape(-1, 1))
        sub = check_sustainability_1c(cfg.graph, a, b).sustainable
        if lp != sub:
            return CheckResult("region-lp-vs-subsets", False, f"disagree at a={a.tolist()}")
    return CheckResult("region-lp-vs-subsets", True, "50 perturbed demands agree")


CHECKS: tuple = (
    check_allocation_argmax,
    check_queue_update,
    check_subsets_vs_maxflow,
    check_region_membership,
    check_independent_lp,
    check_nbs,
    check_stationary_policy,
    check_stability_expectation,
    check_determinism,
)


def run_checks(scenario: Scenario, checks: tuple = CHECKS) -> list:
    out = []
    for fn in checks:
        try:
            out.append(fn(scenario))
        except Exception as exc:  # a crashing check is a failed check
            out.append(CheckResult(fn.__name__.removeprefix("check_").replace("_", "-"), False, f"raised {exc!r}"))
    return out
