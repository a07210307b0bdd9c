import numpy as np
import pytest

from exchange_econ import EconomyConfig, ExchangeGraph, ArrivalSpec, ProductionPlan, RegionError, SizeError
from exchange_econ.oracle import grid_search_nbs
from exchange_econ.policies import check_nbs_constraints, nbs_benchmark

from economies import DESK_PLANS, desk


def test_desk_matches_grid_on_lattice_demand():
    cfg = desk()
    a = np.full((2, 2), 0.499)
    sol = nbs_benchmark(cfg, a)
    grid = grid_search_nbs(cfg, a)
    assert sol.h_star == pytest.approx(grid.h_star, abs=1e-3)
    assert check_nbs_constraints(sol, cfg.graph, cfg.plans, a) == []


def test_grid_never_beats_solver():
    cfg = desk()
    for a in (np.full((2, 2), 0.5), [[0.4, 0.3], [0.2, 0.45]], [[0.6, 0.1], [0.1, 0.6]]):
        sol = nbs_benchmark(cfg, a)
        grid = grid_search_nbs(cfg, a)
        assert grid.h_star <= sol.h_star + 1e-9
        assert check_nbs_constraints(sol, cfg.graph, cfg.plans, a) == []


def test_symmetric_entities_save_equally():
    plans = [[ProductionPlan((2.0, 0.0), 1.0), ProductionPlan((0.0, 2.0), 3.0)],
             [ProductionPlan((0.0, 2.0), 1.0), ProductionPlan((2.0, 0.0), 3.0)]]
    cfg = desk().with_(plans=tuple(tuple(p) for p in plans))
    sol = nbs_benchmark(cfg, np.full((2, 2), 0.4))
    assert sol.savings[0] == pytest.approx(sol.savings[1], rel=1e-5)


def test_uniform_costs_have_no_strict_saving():
    plans = [[ProductionPlan((2.0, 0.0), 1.0), ProductionPlan((0.0, 2.0), 1.0)]] * 2
    cfg = desk().with_(plans=tuple(tuple(p) for p in plans))
    a = np.full((2, 2), 0.5)
    with pytest.raises(RegionError) as exc:
        nbs_benchmark(cfg, a)
    assert exc.value.constraint == "cost"
    with pytest.raises(RegionError):
        grid_search_nbs(cfg, a)


def test_demand_outside_region():
    with pytest.raises(RegionError) as exc:
        nbs_benchmark(desk(), np.full((2, 2), 1.2))
    assert exc.value.constraint in ("independent-cost", "demand")


def test_single_entity_cannot_save():
    cfg = EconomyConfig(ExchangeGraph.self_loops(1), 2, [[ArrivalSpec("deterministic", 0, 1)] * 2],
                        [DESK_PLANS[0]], policy="TwoTimescale")
    with pytest.raises(RegionError):
        nbs_benchmark(cfg, [[0.3, 0.3]])
    with pytest.raises(RegionError):
        grid_search_nbs(cfg, [[0.3, 0.3]])


def test_grid_size_limits():
    cfg = desk()
    with pytest.raises(SizeError):
        grid_search_nbs(cfg, np.full((2, 2), 0.5), resolution=0.01)


def test_constraint_checker_flags_violations():
    cfg = desk()
    a = np.full((2, 2), 0.5)
    sol = nbs_benchmark(cfg, a)
    assert check_nbs_constraints(sol, cfg.graph, cfg.plans, a + 0.2)
