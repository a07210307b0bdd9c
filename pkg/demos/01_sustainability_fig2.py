"""Two entities that can serve each other: when is the economy sustainable?

Entity 0 produces 2 units per slot, entity 1 produces 3. Alone, each can only
absorb its own production; together, any demand pair with a1 + a2 <= 5 can
be carried. This script checks a few demand points three ways (subset
condition, max flow, simulation) and prints the region boundary.
"""
import numpy as np

from exchange_econ import ArrivalSpec, EconomyConfig, ExchangeGraph, ProductionPlan, run, theorem1_bound
from exchange_econ.feasibility import (
    check_sustainability_1c,
    check_sustainability_maxflow,
    interior_margin_1c,
    sample_region_boundary,
)

graph = ExchangeGraph.complete(2)
b = [2.0, 3.0]
plans = [[ProductionPlan((r,), 0.0)] for r in b]


def economy(mean, horizon=200_000):
    arrivals = [[ArrivalSpec("bernoulli-batch", mean, 3)] for _ in range(2)]
    return EconomyConfig(graph, 1, arrivals, plans, horizon=horizon, seed=7)


print("demand   subset-slack  max-flow  margin   bound   time-avg backlog  slope")
for mean in (1.5, 2.2, 2.4, 2.6):
    a = [mean, mean]
    rep = check_sustainability_1c(graph, a, b)
    flow_ok = check_sustainability_maxflow(graph, a, b).sustainable
    cfg = economy(mean)
    s = run(cfg).summary()
    if rep.sustainable:
        eps = interior_margin_1c(graph, a, b)
        bound = f"{theorem1_bound(cfg, eps=eps):7.1f}"
        margin = f"{eps:6.3f}"
    else:
        bound, margin = "    inf", "   -  "
    print(f"{mean:5.2f}   {rep.slack:+10.3f}   {str(flow_ok):>8}  {margin}  {bound}   {s.time_avg_backlog:14.2f}  {s.final_half_slope:+.4f}")

print("\nregion boundary along a few rays (cooperative vs stand-alone):")
for s in sample_region_boundary(graph, plans, 7):
    coop, solo = s.cooperative.ravel(), s.independent.ravel()
    print(f"  dir ({s.direction[0]:.2f}, {s.direction[1]:.2f})  coop ({coop[0]:.3f}, {coop[1]:.3f})"
          f"  alone ({solo[0]:.3f}, {solo[1]:.3f})")
