import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exchange_econ import ExchangeGraph
from exchange_econ.feasibility import build_maxflow_network, max_flow


def _arc_caps(net):
    return {(net.labels[u], net.labels[v]): c for u, v, c in net.arcs}


def test_fig2_network_layout():
    net = build_maxflow_network(ExchangeGraph.complete(2), [2.4, 2.4], [2.0, 3.0])
    assert len(net.labels) == 6
    caps = _arc_caps(net)
    assert caps[("S", "c0")] == 2.4 and caps[("S", "c1")] == 2.4
    assert caps[("p0", "D")] == 2.0 and caps[("p1", "D")] == 3.0
    middle = [k for k in caps if k[0].startswith("c")]
    assert len(middle) == 4
    assert all(caps[k] == 2.4 for k in middle)


def test_self_loops_give_a_matching():
    net = build_maxflow_network(ExchangeGraph.self_loops(3), [1, 1, 1], [1, 1, 1])
    middle = sorted(k for k in _arc_caps(net) if k[0].startswith("c"))
    assert middle == [("c0", "p0"), ("c1", "p1"), ("c2", "p2")]


def test_single_entity_chain():
    net = build_maxflow_network(ExchangeGraph.self_loops(1), [1.5], [1.0])
    assert len(net.arcs) == 3
    assert max_flow(net).value == pytest.approx(1.0)


@pytest.mark.parametrize("a, expected", [((2.4, 2.4), 4.8), ((2.6, 2.6), 5.0), ((0.0, 0.0), 0.0)])
def test_fig2_flow_values(a, expected):
    net = build_maxflow_network(ExchangeGraph.complete(2), a, [2.0, 3.0])
    assert max_flow(net).value == pytest.approx(expected, abs=1e-9)


def _random_graph(rng, n):
    edges = [(j, i) for j in range(n) for i in range(n) if j != i and rng.random() < 0.4]
    return ExchangeGraph.from_edges(n, edges)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10**6))
def test_flow_conservation_and_capacity(n, seed):
    rng = np.random.default_rng(seed)
    g = _random_graph(rng, n)
    a, b = rng.uniform(0, 5, n), rng.uniform(0, 5, n)
    net = build_maxflow_network(g, a, b)
    res = max_flow(net)
    balance = np.zeros(len(net.labels))
    for (u, v, cap), f in zip(net.arcs, res.flows):
        assert -1e-9 <= f <= cap + 1e-9
        balance[u] -= f
        balance[v] += f
    internal = [k for k in range(len(net.labels)) if k not in (net.source, net.sink)]
    assert np.allclose(balance[internal], 0.0, atol=1e-9)
    assert res.value == pytest.approx(balance[net.sink], abs=1e-9)
    assert res.value <= min(a.sum(), b.sum()) + 1e-9
