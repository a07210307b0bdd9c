"""Production plans chosen once per period.

Each entity can make either commodity, but not both at once: entity 0 has
plans (2, 0) and (0, 2), entity 1 has (3, 0) and (0, 3). Plans are picked at
the start of every period of T slots from the backlogs seen then; resources
are shipped every slot. Longer periods react more slowly, so backlogs grow
with T while staying bounded.
"""
from exchange_econ import ArrivalSpec, EconomyConfig, ExchangeGraph, Policy, ProductionPlan, run, theorem2_bound
from exchange_econ.feasibility import in_production_region, production_region_margin

graph = ExchangeGraph.complete(2)
plans = [
    [ProductionPlan((2.0, 0.0), 0.0), ProductionPlan((0.0, 2.0), 0.0)],
    [ProductionPlan((3.0, 0.0), 0.0), ProductionPlan((0.0, 3.0), 0.0)],
]
means = [[0.9, 0.9], [0.9, 0.9]]
print("inside cooperative region:", in_production_region(graph, plans, means))
print("inside stand-alone region:", in_production_region(ExchangeGraph.self_loops(2), plans, means))
print("margin:", round(production_region_margin(graph, plans, means), 6))

print("\n  T   time-avg backlog   bound")
for T in (1, 5, 10, 25, 50):
    cfg = EconomyConfig(
        graph, 2, [[ArrivalSpec("bernoulli-batch", m, 2) for m in row] for row in means], plans,
        period_length=T, horizon=300_000, policy=Policy.TWO_TIMESCALE, seed=7,
    )
    s = run(cfg).summary()
    print(f"{T:3d}   {s.time_avg_backlog:16.2f}   {theorem2_bound(cfg):8.1f}")
