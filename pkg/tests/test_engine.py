import numpy as np
import pytest

from exchange_econ import ArrivalSpec, Policy, regression_slope, run
from exchange_econ.engine import CHUNK
from exchange_econ.feasibility import stationary_policy_1c

from economies import desk, fig2, fig3a


def test_zero_arrivals_keep_backlog_empty():
    cfg = fig2(mean=0.0, horizon=500, kind="deterministic")
    tr = run(cfg)
    assert not tr.total_backlog.any()
    assert tr.entity_backlog.shape == (500, 2)


def test_deterministic_first_slots():
    # arrivals land after service, so the first slot just accumulates
    cfg = fig2(mean=(2.0, 1.0), horizon=3, kind="deterministic")
    tr = run(cfg)
    assert tr.entity_backlog[0].tolist() == [2.0, 1.0]
    # slot 1: both producers serve consumer 0 (5 >= 2), consumer 1 waits
    assert tr.entity_backlog[1].tolist() == [2.0, 2.0]


def test_identical_seed_is_bit_identical():
    for cfg in (fig2(horizon=3000), fig3a(horizon=3000), desk(horizon=3000)):
        a, b = run(cfg), run(cfg)
        assert np.array_equal(a.total_backlog, b.total_backlog)
        assert np.array_equal(a.period_plan, b.period_plan)
        assert np.array_equal(a.nash_sample, b.nash_sample, equal_nan=True)


def test_different_seed_differs():
    assert not np.array_equal(run(fig2(horizon=2000, seed=1)).total_backlog,
                              run(fig2(horizon=2000, seed=2)).total_backlog)


def test_chunk_boundaries_do_not_change_draws():
    long = run(fig2(horizon=CHUNK + 100))
    short = run(fig2(horizon=CHUNK - 5))
    assert np.array_equal(long.total_backlog[: CHUNK - 5], short.total_backlog)


def test_running_average_matches_trace():
    tr = run(fig2(horizon=20_000))
    recomputed = np.cumsum(tr.total_backlog) / np.arange(1, tr.horizon + 1)
    assert np.allclose(recomputed, tr.running_avg_backlog, atol=1e-9 * recomputed.max(), rtol=0)


def test_plans_change_only_on_period_starts():
    seen = []

    def observer(t, alloc, active, z):
        seen.append((t, z))

    cfg = fig3a(period_length=7, horizon=300)
    run(cfg, observer=observer)
    for (t, z), (_, prev) in zip(seen[1:], seen[:-1]):
        if t % 7:
            assert z == prev


def test_producers_never_exceed_their_plan():
    cfg = fig3a(period_length=5, horizon=500)

    def observer(t, alloc, active, z):
        used = {}
        for j, i, k in alloc:
            assert (j, i) in cfg.graph.edges
            assert (j, k) not in used and active[j][k] > 0
            used[(j, k)] = i

    run(cfg, observer=observer)


def test_period_records():
    cfg = desk(horizon=95, period_length=10)
    tr = run(cfg)
    assert tr.n_periods == 10  # last period truncated
    assert tr.period_start.tolist() == list(range(0, 100, 10))
    assert tr.realized_ind_cost.shape == (10, 2)
    assert np.isfinite(tr.nash_sample).all()
    for p, plans in enumerate(tr.period_plan):
        for j, q in enumerate(plans):
            want = 0.0 if q < 0 else cfg.plans[j][q].cost
            assert tr.period_cost[p, j] == want


def test_nash_sample_uses_running_means():
    tr = run(desk(horizon=400))
    expected = np.prod(tr.j_bar - tr.period_cost, axis=1)
    assert np.allclose(tr.nash_sample, expected)


def test_cost_queue_recursion():
    tr = run(desk(horizon=400))
    y = np.zeros(2)
    for p in range(tr.n_periods):
        y = np.maximum(y - tr.realized_ind_cost[p], 0.0) + tr.period_cost[p]
        assert np.allclose(y, tr.virtual_queue[p])


def test_non_costly_runs_have_nan_cost_columns():
    tr = run(fig2(horizon=100))
    assert np.isnan(tr.realized_ind_cost).all() and np.isnan(tr.nash_sample).all()
    assert (tr.period_plan == 0).all() and not tr.period_cost.any()


def test_exterior_demand_grows():
    tr = run(fig2(mean=3.0, horizon=100_000))
    assert tr.total_backlog[-1] > 1e3
    quarter = tr.total_backlog[-25_000:]
    assert regression_slope(quarter) > 0


def test_interior_demand_stays_bounded():
    s = run(fig2(mean=2.2, horizon=100_000)).summary()
    assert s.time_avg_backlog < 30
    assert abs(s.final_half_slope) < 0.01 * 3


def test_stationary_policy_run_is_stable():
    cfg = fig2(mean=2.4, horizon=100_000)
    pol = stationary_policy_1c(cfg.graph, [2.4, 2.4], [2.0, 3.0])
    s = run(cfg, stationary=pol).summary()
    assert abs(s.final_half_slope) < 0.01 * 3


def test_regression_slope():
    assert regression_slope(np.arange(10) * 2.5 + 1) == pytest.approx(2.5)
    assert regression_slope([4.0]) == 0.0


def test_summary_burn_in():
    tr = run(fig2(horizon=1000))
    s = tr.summary(burn_in=0.5)
    assert s.time_avg_backlog == pytest.approx(tr.total_backlog[500:].mean())
    assert set(s.as_dict()) >= {"time_avg_backlog", "final_half_slope", "nash_product_mean"}
