import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from exchange_econ.feasibility import INFEASIBLE, OPTIMAL, UNBOUNDED, lp_solve
from exchange_econ.oracle import vertex_enumeration_lp


def test_maximise_single_variable():
    res = lp_solve([1.0], [[1.0]], [3.0], maximize=True)
    assert res.status == OPTIMAL and res.success
    assert res.fun == pytest.approx(3.0)
    assert res.x[0] == pytest.approx(3.0)


def test_independent_cost_instance():
    # plans (2,0) and (0,2), cost 1 each, demand (1,1)
    A = [[-2.0, 0.0], [0.0, -2.0], [1.0, 1.0]]
    res = lp_solve([1.0, 1.0], A, [-1.0, -1.0, 1.0], bounds=(0.0, 1.0))
    assert res.fun == pytest.approx(1.0)
    assert res.x == pytest.approx([0.5, 0.5])


def test_infeasible_and_unbounded():
    assert lp_solve([1.0], [[1.0]], [-1.0]).status == INFEASIBLE
    assert lp_solve([1.0], [[-1.0]], [0.0], maximize=True).status == UNBOUNDED


def test_equality_constraints_and_free_variables():
    # min x + y, x - y = 1, x, y free within [-5, 5]
    res = lp_solve([1.0, 1.0], A_eq=[[1.0, -1.0]], b_eq=[1.0], bounds=(-5.0, 5.0))
    assert res.success
    assert res.fun == pytest.approx(-9.0)


def test_too_many_variables():
    with pytest.raises(ValueError):
        lp_solve(np.zeros(201), np.zeros((1, 201)), [1.0])


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.integers(0, 10**6))
def test_agrees_with_highs(n, m, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n)
    A = rng.normal(size=(m, n))
    b = rng.uniform(-1.0, 3.0, size=m)
    ours = lp_solve(c, A, b, bounds=(0.0, 4.0))
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(0.0, 4.0)] * n, method="highs")
    assert ours.success == (ref.status == 0)
    if ours.success:
        assert ours.fun == pytest.approx(ref.fun, abs=1e-7)
        assert (A @ ours.x <= b + 1e-7).all()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 10**6))
def test_agrees_with_vertex_enumeration(n, m, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n)
    A = rng.normal(size=(m, n))
    b = rng.uniform(-1.0, 3.0, size=m)
    ours = lp_solve(c, A, b, bounds=(0.0, 2.0))
    ref = vertex_enumeration_lp(c, A, b, upper=np.full(n, 2.0))
    assert ours.success == (ref is not None)
    if ref is not None:
        assert ours.fun == pytest.approx(ref[0], abs=1e-7)
