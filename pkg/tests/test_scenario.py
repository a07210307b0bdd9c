import json
import re
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from exchange_econ import ConfigurationError, Policy
from exchange_econ.scenario import load_scenario, parse_scenario

SCENARIOS = sorted((Path(__file__).parent.parent / "scenarios").glob("*.json"))


def _doc(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_shipped_scenarios_round_trip(path):
    sc = load_scenario(path)
    again = parse_scenario(json.loads(sc.dumps()))
    assert again == sc


def test_unknown_keys_rejected():
    doc = _doc(SCENARIOS[0])
    doc["colour"] = "red"
    with pytest.raises(ConfigurationError):
        parse_scenario(doc)
    doc = _doc(SCENARIOS[0])
    doc["experiment"]["speed"] = 3
    with pytest.raises(ConfigurationError, match="experiment"):
        parse_scenario(doc)


@pytest.mark.parametrize("mutate", [
    lambda d: d["arrivals"].update(means=[[1.0]]),
    lambda d: d["arrivals"].update(a_max=-1),
    lambda d: d.update(policy="Greedy"),
    lambda d: d["graph"].update(edges=[[0, 5]]),
    lambda d: d["arrivals"].update(means=[[9.0], [9.0]]),
    lambda d: d.update(period_length=0),
    lambda d: d["experiment"].update(outputs=["movie"]),
])
def test_invalid_documents(mutate):
    doc = _doc(SCENARIOS[0])
    mutate(doc)
    with pytest.raises(ConfigurationError):
        parse_scenario(doc)


def test_non_finite_numbers_rejected(tmp_path):
    text = re.sub(r'"v_param": [0-9.]+', '"v_param": Infinity', Path(SCENARIOS[0]).read_text())
    assert "Infinity" in text
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(ConfigurationError):
        load_scenario(p)


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_scenario(p)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "nope.json")


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 3),
    st.integers(1, 2),
    st.sampled_from(["deterministic", "bernoulli-batch", "truncated-poisson"]),
    st.integers(0, 2**63),
    st.integers(1, 20),
    st.data(),
)
def test_random_round_trip(n, k, kind, seed, period, data):
    means = [[data.draw(st.floats(0, 2)) for _ in range(k)] for _ in range(n)]
    plans = [[{"rates": [data.draw(st.floats(0, 4)) for _ in range(k)],
               "cost": data.draw(st.floats(0, 5))} for _ in range(data.draw(st.integers(1, 3)))]
             for _ in range(n)]
    edges = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=4))
    doc = {
        "graph": {"n_entities": n, "edges": [list(e) for e in edges]},
        "n_commodities": k,
        "arrivals": {"kind": kind, "a_max": 2, "means": means},
        "plans": plans,
        "period_length": period,
        "policy": "TwoTimescale",
        "seed": seed,
        "experiment": {"horizon": 10, "runs": 2},
    }
    sc = parse_scenario(doc)
    assert sc.config.policy is Policy.TWO_TIMESCALE
    assert parse_scenario(json.loads(sc.dumps())) == sc
