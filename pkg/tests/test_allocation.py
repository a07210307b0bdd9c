import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exchange_econ import ExchangeGraph, SizeError
from exchange_econ.oracle import enumerate_allocations
from exchange_econ.policies import allocation_weight, centralized_maxweight, maxweight_allocate

FULL2 = ExchangeGraph.complete(2)


def test_serves_largest_backlog():
    alloc = maxweight_allocate([[5.0], [3.0]], [[2.0], [2.0]], FULL2)
    assert alloc == frozenset({(0, 0, 0), (1, 0, 0)})
    assert allocation_weight([[5.0], [3.0]], [[2.0], [2.0]], alloc) == 20.0


def test_tie_goes_to_lowest_consumer():
    assert maxweight_allocate([[4.0], [4.0]], [[1.0], [1.0]], FULL2) == frozenset({(0, 0, 0), (1, 0, 0)})


def test_all_zero_backlog_idles():
    assert maxweight_allocate(np.zeros((2, 1)), [[1.0], [1.0]], FULL2) == frozenset()
    assert centralized_maxweight(np.zeros((2, 1)), [[1.0], [1.0]], FULL2) == frozenset()


def test_zero_rate_commodity_idles():
    alloc = maxweight_allocate([[1.0, 9.0], [2.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]], FULL2)
    assert alloc == frozenset({(0, 1, 0)})


def test_respects_graph():
    g = ExchangeGraph.from_edges(3, [(0, 1)])
    alloc = maxweight_allocate([[1.0], [2.0], [9.0]], [[1.0], [1.0], [1.0]], g)
    assert alloc == frozenset({(0, 1, 0), (1, 1, 0), (2, 2, 0)})


def test_centralized_single_pair():
    alloc = centralized_maxweight([[3.0]], [[2.0]], ExchangeGraph.self_loops(1))
    assert allocation_weight([[3.0]], [[2.0]], alloc) == 6.0


def test_centralized_size_limit():
    g = ExchangeGraph.complete(6)
    with pytest.raises(SizeError):
        centralized_maxweight(np.ones((6, 2)), np.ones((6, 2)), g, limit=1000)


def _instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    # two commodities only on small graphs keeps the enumeration cheap
    k = int(rng.integers(1, 3)) if n <= 3 else 1
    if rng.random() < 0.5:
        g = ExchangeGraph.complete(n)
    else:
        g = ExchangeGraph.from_edges(n, [(j, i) for j in range(n) for i in range(n) if rng.random() < 0.5])
    x = rng.integers(0, 4, size=(n, k)).astype(float)
    rates = rng.choice([0.0, 1.0, 2.0, 2.5], size=(n, k))
    return g, x, rates


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_three_routes_agree(seed):
    g, x, rates = _instance(seed)
    fast = maxweight_allocate(x, rates, g)
    central = centralized_maxweight(x, rates, g)
    best, argmax = enumerate_allocations(x, rates, g)
    w = allocation_weight(x, rates, fast)
    assert w == allocation_weight(x, rates, central) == max(best, 0.0)
    if best > 0:
        assert fast in argmax
    # one consumer per (producer, commodity), only along edges
    seen = set()
    for j, i, k in fast:
        assert (j, i) in g.edges and (j, k) not in seen
        seen.add((j, k))


def test_enumeration_examples():
    best, argmax = enumerate_allocations([[5.0], [3.0]], [[2.0], [2.0]], FULL2)
    assert best == 20.0 and argmax == [frozenset({(0, 0, 0), (1, 0, 0)})]
    best, argmax = enumerate_allocations(np.zeros((2, 1)), [[2.0], [2.0]], FULL2)
    assert best == 0.0 and len(argmax) == 9
