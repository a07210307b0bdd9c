"""Command line front end: ``run``, ``region`` and ``verify``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input
(missing or malformed scenario, bad flags, unsupported size), 3 the scenario
asked for the bargaining benchmark but its demand admits none.

``EXCHANGE_ECON_THREADS`` caps the number of worker processes used for the
independent runs of an experiment block.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import checks
from .bounds import theorem1_bound, theorem2_bound, theorem3_bounds
from .engine import run
from .errors import ConfigurationError, InfeasibleError, RegionError, SizeError, UndefinedBoundError
from .feasibility import sample_region_boundary, stationary_policy_1c
from .model import Policy
from .policies.nbs import nbs_benchmark
from .scenario import Scenario, load_scenario

__all__ = ["main", "cmd_run", "cmd_region", "cmd_verify", "write_trace_csv", "max_workers"]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2, 3
THREADS_ENV = "EXCHANGE_ECON_THREADS"
IC_TOLERANCE = 0.01
NASH_TOLERANCE = 0.05
# instability: final-half backlog slope above this fraction of A_max per slot
UNSTABLE_SLOPE = 0.01


def max_workers(n_jobs: int) -> int:
    """Worker cap from the environment, never more than the number of jobs."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if cap < 1:
            raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return max(1, min(cap, n_jobs))


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def write_trace_csv(trace, path) -> None:
    """One row per slot; columns in fixed order, 12 significant digits, CRLF rows."""
    n = trace.config.n_entities
    period = trace.period_of_slot()
    header = (["slot", "total_backlog"] + [f"backlog_{i}" for i in range(n)] + ["period"]
              + [f"cost_{j}" for j in range(n)] + ["nash_product_sample"])
    nash = trace.nash_sample if trace.nash_sample.size == trace.n_periods else np.full(trace.n_periods, math.nan)
    table = np.column_stack([
        np.arange(trace.horizon, dtype=float),
        trace.total_backlog,
        trace.entity_backlog,
        period.astype(float),
        trace.period_cost[period],
        nash[period],
    ])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\r\n")
        np.savetxt(fh, table, fmt="%.12g", delimiter=",", newline="\r\n")


def _bounds(scenario: Scenario) -> dict:
    cfg = scenario.config
    out = {}
    if cfg.policy is Policy.MAXWEIGHT_1C:
        try:
            out["theorem1"] = theorem1_bound(cfg)
        except UndefinedBoundError as exc:
            out["theorem1"] = None
            out["theorem1_note"] = str(exc)
    try:
        out["theorem2"] = theorem2_bound(cfg)
    except UndefinedBoundError as exc:
        out["theorem2"] = None
        out["theorem2_note"] = str(exc)
    if cfg.policy is Policy.COSTLY_IC:
        try:
            t3 = theorem3_bounds(cfg)
            out["theorem3_backlog"] = t3.backlog
            out["theorem3_gap"] = t3.gap
            out["theorem3_c"] = t3.c_const
            out["theorem3_g_max"] = t3.g_max
        except UndefinedBoundError as exc:
            out["theorem3_backlog"] = out["theorem3_gap"] = None
            out["theorem3_note"] = str(exc)
    return out


def _backlog_bound(cfg, bounds: dict) -> Optional[float]:
    if cfg.policy is Policy.MAXWEIGHT_1C:
        return bounds.get("theorem1")
    if cfg.policy is Policy.TWO_TIMESCALE:
        return bounds.get("theorem2")
    return bounds.get("theorem3_backlog")


def _run_one(scenario: Scenario, seed: int, run_dir: Optional[str], stationary) -> dict:
    cfg = scenario.config.with_(seed=seed)
    trace = run(cfg, stationary=stationary, report_every=scenario.experiment.report_every)
    if run_dir is not None and "trace" in scenario.experiment.outputs:
        Path(run_dir).mkdir(parents=True, exist_ok=True)
        write_trace_csv(trace, Path(run_dir) / "trace.csv")
    return {"seed": seed, **trace.summary().as_dict()}


def _flags(scenario: Scenario, summary: dict, bounds: dict, nbs: Optional[dict]) -> dict:
    cfg, exp = scenario.config, scenario.experiment
    flags = {"stable": summary["final_half_slope"] <= UNSTABLE_SLOPE * cfg.a_max}
    bound = _backlog_bound(cfg, bounds)
    flags["backlog_within_bound"] = None if bound is None else summary["time_avg_backlog"] <= bound
    if exp.expect_stable is not None:
        flags["stability_as_expected"] = flags["stable"] == exp.expect_stable
    if cfg.policy is Policy.COSTLY_IC:
        cost = np.array(summary["time_avg_cost"])
        ind = np.array(summary["time_avg_realized_ind_cost"])
        flags["incentive_compatible"] = bool((cost <= ind * (1 + IC_TOLERANCE) + 1e-12).all())
        if nbs is not None and bounds.get("theorem3_gap") is not None:
            h_star = nbs["h_star"]
            floor = h_star - bounds["theorem3_gap"] - NASH_TOLERANCE * abs(h_star)
            flags["nash_product_within_gap"] = summary["nash_product_mean"] >= floor
    return flags


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def _write_json(path, doc) -> None:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, list):
            return [clean(x) for x in v]
        return v

    doc = json.loads(json.dumps(doc, default=_json_default))
    Path(path).write_text(json.dumps(clean(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _stationary_for(scenario: Scenario):
    cfg = scenario.config
    if cfg.policy is not Policy.MAXWEIGHT_1C:
        raise ConfigurationError("experiment/stationary needs the MaxWeight1C policy")
    b = np.array([plans_j[0].rates[0] for plans_j in cfg.plans])
    return stationary_policy_1c(cfg.graph, cfg.arrival_means[:, 0], b)


def _write_region(scenario: Scenario, n_directions: int, path) -> None:
    cfg = scenario.config
    samples = sample_region_boundary(cfg.graph, cfg.plans, n_directions, cfg.n_commodities)
    n, k_dim = cfg.n_entities, cfg.n_commodities
    names = [f"{i}_{k}" for i in range(n) for k in range(k_dim)]
    header = [f"dir_{c}" for c in names] + [f"coop_{c}" for c in names] + [f"ind_{c}" for c in names]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\r\n")
        for s in samples:
            row = list(s.direction) + list(s.cooperative.ravel()) + list(s.independent.ravel())
            fh.write(",".join(_fmt(v) for v in row) + "\r\n")


def cmd_run(path, out, seed: Optional[int] = None) -> int:
    try:
        scenario = load_scenario(path)
        if seed is not None:
            if not 0 <= seed < 2**64:
                raise ConfigurationError("seed must lie in [0, 2**64)")
            scenario = Scenario(scenario.config.with_(seed=seed), scenario.experiment, scenario.arrival_kind)
        exp = scenario.experiment
        stationary = _stationary_for(scenario) if exp.stationary else None
        workers = max_workers(exp.runs)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigurationError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    cfg = scenario.config
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)

    nbs = None
    if exp.nbs_benchmark:
        try:
            sol = nbs_benchmark(cfg, eps1=exp.eps1, eps2=exp.eps2)
        except RegionError as exc:
            print(f"error: bargaining benchmark infeasible ({exc.constraint}): {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        nbs = {"h_star": sol.h_star, "coop_cost": sol.coop_cost, "ind_cost": sol.ind_cost}
    bounds = _bounds(scenario)

    seeds = [cfg.seed + r for r in range(exp.runs)]
    dirs = [str(out)] if exp.runs == 1 else [str(out / f"run_{r:03d}") for r in range(exp.runs)]
    if workers == 1:
        summaries = [_run_one(scenario, s, d, stationary) for s, d in zip(seeds, dirs)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_one, [scenario] * exp.runs, seeds, dirs, [stationary] * exp.runs))

    runs = []
    for summary, d in zip(summaries, dirs):
        flags = _flags(scenario, summary, bounds, nbs)
        entry = {**summary, "flags": flags}
        runs.append(entry)
        if exp.runs > 1 and "summary" in exp.outputs:
            _write_json(Path(d) / "summary.json", {**entry, "bounds": bounds})
    if "region" in exp.outputs:
        try:
            _write_region(scenario, exp.directions, out / "region.csv")
        except SizeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    if "summary" in exp.outputs:
        doc = {
            "policy": cfg.policy.value,
            "horizon": cfg.horizon,
            "bounds": bounds,
            "nbs": nbs,
            "runs": runs,
            "all_flags_pass": all(v is not False for r in runs for v in r["flags"].values()),
        }
        if exp.runs == 1:
            doc.update({k: v for k, v in runs[0].items()})
        _write_json(out / "summary.json", doc)
    return EXIT_OK


def cmd_region(path, directions: int, out) -> int:
    if directions < 1:
        print("error: --directions must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        scenario = load_scenario(path)
        _write_region(scenario, directions, out)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigurationError, SizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_verify(path) -> int:
    try:
        scenario = load_scenario(path)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    results = checks.run_checks(scenario)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exchange-econ", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write trace.csv / summary.json")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    p = sub.add_parser("region", help="sample the sustainability region boundary")
    p.add_argument("scenario")
    p.add_argument("--directions", type=int, default=64)
    p.add_argument("--out", required=True, help="output CSV file")

    p = sub.add_parser("verify", help="run oracle-equivalence and invariant checks")
    p.add_argument("scenario")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return cmd_run(args.scenario, args.out, args.seed)
    if args.command == "region":
        return cmd_region(args.scenario, args.directions, args.out)
    return cmd_verify(args.scenario)


if __name__ == "__main__":
    sys.exit(main())
