"""Costly plans: cooperation has to pay off for every entity.

Each entity makes one commodity cheaply (cost 1 per period) and the other
expensively (cost 3). Alone, each must buy some of the expensive plan; by
specialising and trading, both save. The static bargaining benchmark gives
the fair split of savings; the online cost-aware policy tracks it once the
weight V on costs is large enough to outweigh the backlog pressure.
"""
import numpy as np

from exchange_econ import ArrivalSpec, EconomyConfig, ExchangeGraph, Policy, ProductionPlan, run, theorem3_bounds
from exchange_econ.oracle import grid_search_nbs
from exchange_econ.policies import independent_costs, nbs_benchmark

graph = ExchangeGraph.complete(2)
plans = [
    [ProductionPlan((2.0, 0.0), 1.0), ProductionPlan((0.0, 2.0), 3.0)],
    [ProductionPlan((2.0, 0.0), 3.0), ProductionPlan((0.0, 2.0), 1.0)],
]
a = np.full((2, 2), 0.5)


def economy(v, horizon=300_000):
    arrivals = [[ArrivalSpec("bernoulli-batch", 0.5, 1)] * 2] * 2
    return EconomyConfig(graph, 2, arrivals, plans, period_length=10, horizon=horizon,
                         policy=Policy.COSTLY_IC, v_param=v, seed=7)


print("stand-alone costs per period:", independent_costs(plans, a))
sol = nbs_benchmark(economy(10.0), a)
print("bargaining costs:", np.round(sol.coop_cost, 4), " Nash product:", round(sol.h_star, 6))
print("grid search Nash product:", grid_search_nbs(economy(10.0), a).h_star)

print("\n     V   cost per period      stand-alone (realized)   mean Nash sample   backlog   C/V")
for v in (10.0, 100.0, 1000.0, 10000.0):
    cfg = economy(v)
    s = run(cfg).summary()
    print(f"{v:6g}   {np.round(s.time_avg_cost, 3)}   {np.round(s.time_avg_realized_ind_cost, 3)}"
          f"   {s.nash_product_mean:16.4f}   {s.time_avg_backlog:7.1f}   {theorem3_bounds(cfg).gap:6.2f}")
