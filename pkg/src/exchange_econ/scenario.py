"""JSON scenario files: one economy plus an experiment block.

A scenario looks like::

    {
      "graph": {"n_entities": 2, "edges": [[0, 1], [1, 0]]},
      "n_commodities": 1,
      "arrivals": {"kind": "bernoulli-batch", "a_max": 3, "means": [[2.2], [2.2]]},
      "plans": [[{"rates": [2], "cost": 0}], [{"rates": [3], "cost": 0}]],
      "period_length": 1,
      "policy": "MaxWeight1C",
      "v_param": 0,
      "seed": 7,
      "experiment": {"runs": 1, "horizon": 100000, "outputs": ["trace", "summary"]}
    }

Self-loops are implied and need not be listed. Unknown keys are rejected.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from .errors import ConfigurationError
from .model import ArrivalSpec, EconomyConfig, ExchangeGraph, Policy, ProductionPlan

__all__ = ["Experiment", "Scenario", "SCHEMA", "load_scenario", "parse_scenario", "OUTPUTS"]

OUTPUTS = ("trace", "summary", "region")

_number = {"type": "number"}
_nonneg = {"type": "number", "minimum": 0}
_pos_int = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["graph", "n_commodities", "arrivals", "plans", "policy"],
    "properties": {
        "graph": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_entities", "edges"],
            "properties": {
                "n_entities": _pos_int,
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 0},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
            },
        },
        "n_commodities": _pos_int,
        "arrivals": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "a_max", "means"],
            "properties": {
                "kind": {"enum": ["deterministic", "bernoulli-batch", "truncated-poisson"]},
                "a_max": {"type": "number", "exclusiveMinimum": 0},
                "means": {"type": "array", "items": {"type": "array", "items": _nonneg}},
            },
        },
        "plans": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["rates", "cost"],
                    "properties": {
                        "rates": {"type": "array", "items": _nonneg},
                        "cost": _nonneg,
                    },
                },
            },
        },
        "period_length": _pos_int,
        "policy": {"enum": [p.value for p in Policy]},
        "v_param": _nonneg,
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "b_max": {"type": "number", "exclusiveMinimum": 0},
        "experiment": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "runs": _pos_int,
                "horizon": _pos_int,
                "report_every": {"type": "integer", "minimum": 0},
                "outputs": {"type": "array", "items": {"enum": list(OUTPUTS)}, "uniqueItems": True},
                "nbs_benchmark": {"type": "boolean"},
                "eps1": {"type": "number", "exclusiveMinimum": 0},
                "eps2": {"type": "number", "exclusiveMinimum": 0},
                "expect_stable": {"type": ["boolean", "null"]},
                "stationary": {"type": "boolean"},
                "directions": _pos_int,
            },
        },
    },
}


@dataclass(frozen=True)
class Experiment:
    runs: int = 1
    horizon: int = 10_000
    report_every: int = 0
    outputs: tuple = ("trace", "summary")
    nbs_benchmark: bool = False
    eps1: float = 1e-3
    eps2: float = 1e-3
    expect_stable: Optional[bool] = None
    stationary: bool = False  # drive the run by the constructive randomized policy
    directions: int = 64


@dataclass(frozen=True)
class Scenario:
    config: EconomyConfig
    experiment: Experiment = field(default_factory=Experiment)
    arrival_kind: str = "bernoulli-batch"

    def to_dict(self) -> dict:
        cfg, exp = self.config, self.experiment
        n = cfg.n_entities
        edges = sorted((j, i) for (j, i) in cfg.graph.edges if j != i)
        out = {
            "graph": {"n_entities": n, "edges": [list(e) for e in edges]},
            "n_commodities": cfg.n_commodities,
            "arrivals": {
                "kind": self.arrival_kind,
                "a_max": cfg.a_max,
                "means": cfg.arrival_means.tolist(),
            },
            "plans": [[{"rates": list(p.rates), "cost": p.cost} for p in plans_j] for plans_j in cfg.plans],
            "period_length": cfg.period_length,
            "policy": cfg.policy.value,
            "v_param": cfg.v_param,
            "seed": cfg.seed,
            "experiment": {
                "runs": exp.runs,
                "horizon": exp.horizon,
                "report_every": exp.report_every,
                "outputs": list(exp.outputs),
                "nbs_benchmark": exp.nbs_benchmark,
                "eps1": exp.eps1,
                "eps2": exp.eps2,
                "expect_stable": exp.expect_stable,
                "stationary": exp.stationary,
                "directions": exp.directions,
            },
        }
        if cfg.b_max is not None:
            out["b_max"] = cfg.b_max
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check_finite(node, path="$"):
    if isinstance(node, float) and not math.isfinite(node):
        raise ConfigurationError(f"{path}: numbers must be finite")
    if isinstance(node, dict):
        for k, v in node.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(node, list):
        for i, v in enumerate(node):
            _check_finite(v, f"{path}[{i}]")


def parse_scenario(doc: dict) -> Scenario:
    """Validate a decoded JSON document and build the scenario.

    Every problem is reported as :class:`ConfigurationError`.
    """
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigurationError(f"{where}: {exc.message}") from None
    _check_finite(doc)
    n = doc["graph"]["n_entities"]
    k_dim = doc["n_commodities"]
    exp = Experiment(**{
        k: tuple(v) if k == "outputs" else v for k, v in doc.get("experiment", {}).items()
    })
    arr = doc["arrivals"]
    means = arr["means"]
    if len(means) != n or any(len(row) != k_dim for row in means):
        raise ConfigurationError(f"arrivals/means must be an {n}x{k_dim} table")
    try:
        graph = ExchangeGraph.from_edges(n, [tuple(e) for e in doc["graph"]["edges"]])
        arrivals = [[ArrivalSpec(arr["kind"], float(m), float(arr["a_max"])) for m in row] for row in means]
        plans = [[ProductionPlan(tuple(float(r) for r in p["rates"]), float(p["cost"])) for p in plans_j]
                 for plans_j in doc["plans"]]
        config = EconomyConfig(
            graph=graph,
            n_commodities=k_dim,
            arrivals=arrivals,
            plans=plans,
            period_length=doc.get("period_length", 1),
            horizon=exp.horizon,
            policy=doc["policy"],
            v_param=float(doc.get("v_param", 0.0)),
            seed=doc.get("seed", 0),
            b_max=doc.get("b_max"),
        )
    except ConfigurationError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigurationError(str(exc)) from None
    return Scenario(config, exp, arr["kind"])


def load_scenario(path) -> Scenario:
    """Read and validate a UTF-8 JSON scenario file.

    Missing files raise :class:`FileNotFoundError`; anything malformed raises
    :class:`ConfigurationError`.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed JSON: {exc}") from None
    return parse_scenario(doc)
