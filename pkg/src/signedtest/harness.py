"""Experiment engine: seeded tester runs, aggregation, JSON reports.

A report is a pure function of its config (wall-time fields aside): trials
draw their randomness from per-trial substreams keyed by trial index, so the
worker pool size never changes any result, only the elapsed time.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounded_testers as bt
from . import dense_testers as dt
from . import exact
from .core import Sign, SignedGraph, Witness, WitnessKind, load_edge_list
from .generators import GenSpec, generate
from .oracles import BoundedDegreeOracle, DenseOracle, RandomSource

SCHEMA_VERSION = 1
WORKERS_ENV = "SIGNEDTEST_WORKERS"

PROPERTIES = ("balance", "clusterability", "triangle")
MODELS = ("dense", "bounded")

_KIND_TOKENS = {
    WitnessKind.BAD_CYCLE: "bad-cycle",
    WitnessKind.ODD_NEGATIVE_CYCLE: "odd-negative-cycle",
    WitnessKind.SIGNED_TRIANGLE: "signed-triangle",
}
_TOKEN_KINDS = {v: k for k, v in _KIND_TOKENS.items()}


def witness_to_json(w: Witness) -> dict:
    return {
        "kind": _KIND_TOKENS[w.kind],
        "nodes": [int(v) for v in w.nodes],
        "signs": [s.token for s in w.signs],
    }


def witness_from_json(d: dict) -> Witness:
    try:
        kind = _TOKEN_KINDS[d["kind"]]
        nodes = tuple(int(v) for v in d["nodes"])
        signs = tuple(Sign.from_token(s) for s in d["signs"])
    except KeyError as exc:
        raise ValueError(f"malformed witness record: missing {exc}") from exc
    return Witness(kind, nodes, signs)


def parse_pattern(text: str):
    if len(text) != 3 or any(ch not in "+-" for ch in text):
        raise ValueError(f"pattern must be 3 signs like '++-', got {text!r}")
    return tuple(Sign.from_token(ch) for ch in text)


def wilson(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% (by default) Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must be in [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class ExperimentConfig:
    """One tester, one instance, many seeded trials.

    ``instance`` is either a GenSpec or a path to an .sgl file (pass ``d``
    to attach a degree bound to file-loaded graphs for the bounded model).
    Override fields left as None use the tester defaults.
    """

    property: str
    model: str
    eps: float
    instance: GenSpec | str
    trials: int = 50
    seed: int = 0
    pattern: str = "++-"
    d: int | None = None
    # budget/constant overrides
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    c4: float | None = None
    c5: float | None = None
    c6: float | None = None
    c_b: float | None = None
    c_e: float | None = None
    c_c: float | None = None
    c_t: float | None = None
    walk_len_log_exponent: int | None = None
    balance_len_eps_exponent: int | None = None
    allow_exact_fallback: bool | None = None
    triple_samples: int | None = None
    node_samples: int | None = None
    subset_size: int | None = None

    def __post_init__(self) -> None:
        if self.property not in PROPERTIES:
            raise ValueError(f"property must be one of {PROPERTIES}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must be in (0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name in ("c1", "c2", "c3", "c4", "c5", "c6", "c_b", "c_e", "c_c", "c_t",
                     "triple_samples", "node_samples", "subset_size"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"override {name} must be positive")
        if self.property == "triangle":
            parse_pattern(self.pattern)

    def bounded_constants(self) -> bt.BoundedConstants:
        base = bt.DEFAULT_CONSTANTS
        kw = {}
        for name in ("c1", "c2", "c3", "c4", "c5", "c6",
                     "walk_len_log_exponent", "balance_len_eps_exponent",
                     "allow_exact_fallback"):
            v = getattr(self, name)
            if v is not None:
                kw[name] = v
        return dataclasses.replace(base, **kw) if kw else base


def _config_to_dict(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    if isinstance(cfg.instance, GenSpec):
        d["instance"] = {"genspec": dataclasses.asdict(cfg.instance)}
    else:
        d["instance"] = {"path": str(cfg.instance)}
    return d


def load_instance(cfg: ExperimentConfig) -> SignedGraph:
    if isinstance(cfg.instance, GenSpec):
        g, _ = generate(cfg.instance)
    else:
        g = load_edge_list(cfg.instance, degree_bound=cfg.d)
    if cfg.model == "bounded" and g.degree_bound is None:
        raise ValueError("bounded-model run needs a degree bound; pass d or use "
                         "a family that sets one")
    return g


def _resolved_constants(cfg: ExperimentConfig, g: SignedGraph) -> dict:
    if cfg.model == "dense":
        out = {
            "c_b": cfg.c_b if cfg.c_b is not None else dt.C_BALANCE,
            "c_e": cfg.c_e if cfg.c_e is not None else dt.C_EDGES,
            "c_c": cfg.c_c if cfg.c_c is not None else dt.C_CLUSTER,
            "c_t": cfg.c_t if cfg.c_t is not None else dt.C_TRIANGLE,
        }
        if cfg.property == "triangle":
            out["triple_samples"] = (cfg.triple_samples if cfg.triple_samples is not None
                                     else dt.default_triple_samples(cfg.eps, out["c_t"]))
        if cfg.property == "balance":
            out["node_samples"] = (cfg.node_samples if cfg.node_samples is not None
                                   else dt.default_node_samples(cfg.eps, out["c_b"]))
        if cfg.property == "clusterability":
            out["subset_size"] = (cfg.subset_size if cfg.subset_size is not None
                                  else dt.default_subset_size(cfg.eps, out["c_c"]))
        return out
    consts = cfg.bounded_constants()
    out = dataclasses.asdict(consts)
    out["c_t"] = cfg.c_t if cfg.c_t is not None else bt.C_TRIANGLE_BD
    if cfg.property == "balance":
        p = bt.balance_walk_schedule(g.n, g.degree_bound, cfg.eps, consts)
        out["schedule"] = dataclasses.asdict(p)
    elif cfg.property == "clusterability":
        p = bt.cluster_walk_schedule(g.n, g.degree_bound, cfg.eps, consts)
        out["schedule"] = dataclasses.asdict(p)
    return out


def _run_one_trial(cfg: ExperimentConfig, g: SignedGraph, trial: int) -> dict:
    rng = RandomSource(cfg.seed).stream(trial)
    t0 = time.perf_counter()
    if cfg.model == "dense":
        o = DenseOracle(g)
        if cfg.property == "triangle":
            v = dt.test_triangle_dense(o, parse_pattern(cfg.pattern),
                                       dt.DenseParams(eps=cfg.eps, seed=rng,
                                                      triple_samples=cfg.triple_samples),
                                       c_t=cfg.c_t if cfg.c_t is not None else dt.C_TRIANGLE)
        elif cfg.property == "balance":
            v = dt.test_balance_dense(o, cfg.eps, rng,
                                      c_b=cfg.c_b if cfg.c_b is not None else dt.C_BALANCE,
                                      node_samples=cfg.node_samples)
        else:
            v = dt.test_clusterability_dense(
                o, cfg.eps, rng,
                c_e=cfg.c_e if cfg.c_e is not None else dt.C_EDGES,
                c_c=cfg.c_c if cfg.c_c is not None else dt.C_CLUSTER,
                subset_size=cfg.subset_size)
    else:
        o = BoundedDegreeOracle(g)
        consts = cfg.bounded_constants()
        if cfg.property == "triangle":
            v = bt.test_triangle_bounded(o, parse_pattern(cfg.pattern), cfg.eps, rng,
                                         c_t=cfg.c_t if cfg.c_t is not None else bt.C_TRIANGLE_BD)
        elif cfg.property == "balance":
            v = bt.test_balance_bounded(o, cfg.eps, rng, constants=consts)
        else:
            v = bt.test_clusterability_bounded(o, cfg.eps, rng, constants=consts)
    wall = time.perf_counter() - t0
    row = {
        "trial": trial,
        "decision": v.decision,
        "queries": v.queries_used,
        "exact_fallback": v.exact_fallback,
        "wall_time_s": wall,
        "witness_valid": None,
        "witness": None,
    }
    if v.witness is not None:
        row["witness"] = witness_to_json(v.witness)
        row["witness_valid"] = exact.verify_witness(g, v.witness) is None
    return row


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    resolved_constants: dict
    instance_summary: dict
    trials: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "resolved_constants": self.resolved_constants,
            "instance": self.instance_summary,
            "trials": self.trials,
            "aggregates": self.aggregates,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def strip_wall_times(report_dict: dict) -> dict:
    """Deep copy with every wall-time field zeroed (determinism compares)."""
    out = json.loads(json.dumps(report_dict))
    for row in out.get("trials", []):
        row["wall_time_s"] = 0.0
    agg = out.get("aggregates", {})
    if "mean_wall_time_s" in agg:
        agg["mean_wall_time_s"] = 0.0
    return out


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute cfg.trials independent tester runs and aggregate them."""
    g = load_instance(cfg)
    workers = _worker_count()
    indices = list(range(cfg.trials))
    if workers == 1:
        rows = [_run_one_trial(cfg, g, t) for t in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _run_one_trial(cfg, g, t), indices))
    rows.sort(key=lambda r: r["trial"])
    rejects = sum(1 for r in rows if r["decision"] == "reject")
    lo, hi = wilson(rejects, cfg.trials)
    queries = [r["queries"] for r in rows]
    aggregates = {
        "trials": cfg.trials,
        "rejects": rejects,
        "reject_rate": rejects / cfg.trials,
        "wilson_low": lo,
        "wilson_high": hi,
        "mean_queries": float(np.mean(queries)),
        "max_queries": int(max(queries)),
        "mean_wall_time_s": float(np.mean([r["wall_time_s"] for r in rows])),
        "all_reject_witnesses_valid": all(
            r["witness_valid"] for r in rows
            if r["decision"] == "reject" and r["witness"] is not None),
    }
    summary = {"n": g.n, "edges": g.num_edges, "degree_bound": g.degree_bound}
    return ExperimentReport(
        config=_config_to_dict(cfg),
        resolved_constants=_resolved_constants(cfg, g),
        instance_summary=summary,
        trials=rows,
        aggregates=aggregates,
    )


def run_scaling(cfg: ExperimentConfig, n_list: list[int]) -> dict:
    """Per-N experiments plus a log-log least-squares exponent fit."""
    if len(n_list) < 3:
        raise ValueError("need >= 3 points for a scaling fit")
    if not isinstance(cfg.instance, GenSpec):
        raise ValueError("scaling runs need a generated instance family")
    points = []
    for n in n_list:
        spec = dataclasses.replace(cfg.instance, n=n)
        sub = dataclasses.replace(cfg, instance=spec)
        rep = run_experiment(sub)
        points.append({
            "n": n,
            "mean_queries": rep.aggregates["mean_queries"],
            "max_queries": rep.aggregates["max_queries"],
            "reject_rate": rep.aggregates["reject_rate"],
            "mean_wall_time_s": rep.aggregates["mean_wall_time_s"],
        })
    if any(p["mean_queries"] <= 0 for p in points):
        raise ValueError("cannot fit an exponent through zero-query runs")
    xs = np.log([p["n"] for p in points])
    ys = np.log([p["mean_queries"] for p in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    return {
        "schema_version": SCHEMA_VERSION,
        "config": _config_to_dict(cfg),
        "n_list": list(n_list),
        "points": points,
        "fitted_exponent": float(slope),
        "fit_intercept": float(intercept),
    }


def write_scaling_csv(table: dict, path) -> None:
    lines = ["n,mean_queries,max_queries,reject_rate"]
    for p in table["points"]:
        lines.append(f"{p['n']},{p['mean_queries']},{p['max_queries']},{p['reject_rate']}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
