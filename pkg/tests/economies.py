"""Small economies shared by the tests."""
from exchange_econ import ArrivalSpec, EconomyConfig, ExchangeGraph, Policy, ProductionPlan


def fig2(mean=2.2, horizon=10_000, seed=7, kind="bernoulli-batch", a_max=3):
    """Two entities, full graph, fixed production b = (2, 3)."""
    means = mean if isinstance(mean, (tuple, list)) else (mean, mean)
    return EconomyConfig(
        graph=ExchangeGraph.complete(2),
        n_commodities=1,
        arrivals=[[ArrivalSpec(kind, m, a_max)] for m in means],
        plans=[[ProductionPlan((2.0,), 0.0)], [ProductionPlan((3.0,), 0.0)]],
        horizon=horizon,
        seed=seed,
    )


FIG3A_PLANS = (
    (ProductionPlan((2.0, 0.0), 0.0), ProductionPlan((0.0, 2.0), 0.0)),
    (ProductionPlan((3.0, 0.0), 0.0), ProductionPlan((0.0, 3.0), 0.0)),
)


def fig3a(mean=0.9, period_length=10, horizon=10_000, seed=7, a_max=2):
    return EconomyConfig(
        graph=ExchangeGraph.complete(2),
        n_commodities=2,
        arrivals=[[ArrivalSpec("bernoulli-batch", mean, a_max)] * 2] * 2,
        plans=FIG3A_PLANS,
        period_length=period_length,
        horizon=horizon,
        policy=Policy.TWO_TIMESCALE,
        seed=seed,
    )


# each entity is cheap at one commodity and expensive at the other
DESK_PLANS = (
    (ProductionPlan((2.0, 0.0), 1.0), ProductionPlan((0.0, 2.0), 3.0)),
    (ProductionPlan((2.0, 0.0), 3.0), ProductionPlan((0.0, 2.0), 1.0)),
)


def desk(v_param=10.0, period_length=10, horizon=10_000, seed=7, mean=0.5):
    return EconomyConfig(
        graph=ExchangeGraph.complete(2),
        n_commodities=2,
        arrivals=[[ArrivalSpec("bernoulli-batch", mean, 1)] * 2] * 2,
        plans=DESK_PLANS,
        period_length=period_length,
        horizon=horizon,
        policy=Policy.COSTLY_IC,
        v_param=v_param,
        seed=seed,
    )
