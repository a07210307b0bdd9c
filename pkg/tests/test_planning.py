import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exchange_econ import ConfigurationError, EntityNotSelfSustainableError, InvalidArgumentError, ProductionPlan
from exchange_econ.oracle import vertex_enumeration_lp
from exchange_econ.policies import (
    IndependentCostBenchmark,
    independent_cost_lp,
    peaked_backlogs,
    plan_scores_alg3,
    plan_select_alg2,
    plan_select_alg3,
    realized_independent_cost,
    virtual_queue_update,
)

from economies import FIG3A_PLANS

SPLIT = [ProductionPlan((2.0, 0.0), 1.0), ProductionPlan((0.0, 2.0), 1.0)]


def test_peaked_backlogs_keeps_lowest_max():
    x = np.array([[1.0, 4.0], [3.0, 3.0], [5.0, 0.0]])
    assert peaked_backlogs(x, [0, 1]).tolist() == [[0.0, 4.0], [3.0, 0.0], [0.0, 0.0]]


def test_alg2_follows_commodity_pressure():
    x = [[0.0, 5.0], [1.0, 6.0]]
    assert plan_select_alg2(x, FIG3A_PLANS[1], [0, 1]) == 1
    assert plan_select_alg2([[6.0, 1.0], [0.0, 0.0]], FIG3A_PLANS[1], [0, 1]) == 0


def test_alg2_ties_and_single_plan():
    assert plan_select_alg2(np.zeros((2, 2)), FIG3A_PLANS[0], [0, 1]) == 0
    assert plan_select_alg2([[0.0, 9.0]], [ProductionPlan((1.0, 0.0), 0.0)], [0]) == 0
    with pytest.raises(ConfigurationError):
        plan_select_alg2([[1.0, 1.0]], [], [0])


def test_alg3_score_example():
    # served backlog such that both plans serve 5 units of weight
    plans = [ProductionPlan((5.0,), 1.0), ProductionPlan((5.0,), 3.0)]
    scores = plan_scores_alg3([[1.0]], 0.0, 2.0, plans, 1, 10.0)
    assert scores == pytest.approx([20.0, 0.0, 20.0])
    # plans win ties against idling
    assert plan_select_alg3([[1.0]], 0.0, 2.0, plans, 1, 10.0) == 0


def test_alg3_large_cost_queue_idles():
    plans = [ProductionPlan((5.0,), 1.0), ProductionPlan((5.0,), 3.0)]
    assert plan_select_alg3([[1.0]], 1e6, 2.0, plans, 1, 10.0) is None


def test_alg3_all_zero_picks_first_plan():
    assert plan_select_alg3(np.zeros((1, 2)), 0.0, 0.0, SPLIT, 1, 0.0) == 0


@settings(max_examples=100)
@given(st.lists(st.floats(0, 50), min_size=4, max_size=4))
def test_alg3_without_cost_pressure_matches_alg2(values):
    x = np.array(values).reshape(2, 2)
    plans = [ProductionPlan(p.rates, 0.0) for p in FIG3A_PLANS[1]]
    x_hat = peaked_backlogs(x, [0, 1])
    assert plan_select_alg3(x_hat, 0.0, 0.0, plans, 3, 0.0) == plan_select_alg2(x, plans, [0, 1])


@pytest.mark.parametrize("args, expected", [((4, 2, 3), 5), ((0, 5, 0), 0), ((1, 0, 2.5), 3.5)])
def test_virtual_queue_examples(args, expected):
    assert virtual_queue_update(*args) == expected


def test_virtual_queue_rejects_negative():
    with pytest.raises(InvalidArgumentError):
        virtual_queue_update(-1, 0, 0)


def test_independent_cost_examples():
    cost, zeta = independent_cost_lp([1.0, 1.0], SPLIT)
    assert cost == pytest.approx(1.0) and zeta == pytest.approx([0.5, 0.5])
    cost, zeta = independent_cost_lp([0.0, 0.0], SPLIT)
    assert cost == 0.0 and not zeta.any()
    cost, zeta = independent_cost_lp([1.0, 1.0], [ProductionPlan((1.0, 1.0), 3.0)])
    assert cost == pytest.approx(3.0) and zeta == pytest.approx([1.0])
    with pytest.raises(EntityNotSelfSustainableError):
        independent_cost_lp([2.0, 2.0], SPLIT)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_independent_cost_matches_vertices_and_is_monotone(seed):
    rng = np.random.default_rng(seed)
    n_plans = int(rng.integers(1, 4))
    rates = rng.uniform(0, 3, size=(n_plans, 2))
    costs = rng.uniform(0, 4, size=n_plans)
    plans = [ProductionPlan(tuple(r), float(c)) for r, c in zip(rates, costs)]
    a = rng.uniform(0, 1, size=2)
    A = np.vstack([-rates.T, np.ones((1, n_plans))])
    ref = vertex_enumeration_lp(costs, A, np.concatenate([-a, [1.0]]), upper=np.ones(n_plans))
    try:
        cost, zeta = independent_cost_lp(a, plans)
    except EntityNotSelfSustainableError:
        assert ref is None
        return
    assert ref is not None and cost == pytest.approx(ref[0], abs=1e-7)
    assert (zeta >= -1e-12).all() and zeta.sum() <= 1 + 1e-9
    try:
        assert independent_cost_lp(2 * a, plans)[0] >= cost - 1e-9
    except EntityNotSelfSustainableError:
        pass


def test_realized_cost_examples():
    assert realized_independent_cost([10.0, 10.0], SPLIT, 10).value == pytest.approx(1.0)
    assert realized_independent_cost([0.0, 0.0], SPLIT, 10) == (0.0, False)
    single = [ProductionPlan((1.0,), 2.5)]
    assert realized_independent_cost([1.0], single, 1).value == pytest.approx(2.5)


def test_realized_cost_capped_when_uncoverable():
    rc = realized_independent_cost([40.0, 40.0], SPLIT, 10)
    assert rc.capped
    # the most that can be covered is the full plan budget
    assert rc.value == pytest.approx(1.0, rel=1e-9)


def test_benchmark_running_mean():
    bench = IndependentCostBenchmark(2)
    for v in ([1.0, 2.0], [3.0, 2.0], [5.0, 5.0]):
        bench.update(v)
    assert bench.j_bar == pytest.approx([3.0, 3.0])
    assert bench.j_t.tolist() == [5.0, 5.0] and bench.n_periods == 3
    with pytest.raises(InvalidArgumentError):
        bench.update([-1.0, 0.0])
