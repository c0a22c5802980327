"""Instance generators, experiment orchestration, and CSV persistence.

Generated instances honor the large-market condition (no single edge worth a
non-vanishing share of the attainable value), and experiment runs are fully
determined by (config, seed): trial k draws every random object from the
stream labeled ``trial:k``, so worker count and scheduling never change the
output bytes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    GenerationError,
    Item,
    KnapsackInstance,
    LeftVertex,
    RngStream,
    evaluate,
    knapsack_to_bipartite,
)
from .offline import brute_force_opt, greedy_matching, threshold
from .online_knapsack import run_on, run_virtual
from .truthful import run_on_truth

__all__ = [
    "ExperimentConfig",
    "CSV_COLUMNS",
    "SUMMARY_COLUMNS",
    "gen_d2d_instance",
    "gen_knapsack_instance",
    "competitive_ratio",
    "run_trial",
    "run_experiment",
    "rows_to_csv",
    "summary_path",
]

KINDS = ("knapsack", "d2d", "matching")
ALGOS = ("on", "virtual", "on-truth", "threshold", "greedy", "exact")
BASELINES = ("exact", "threshold")

CSV_COLUMNS = [
    "kind", "delta", "trial", "seed", "algo", "baseline", "n_left", "n_right",
    "budget", "online_value", "baseline_value", "ratio", "spend",
    "payments_total", "feasible", "gamma", "t",
]

SUMMARY_COLUMNS = [
    "kind", "delta", "trials", "algo", "baseline", "mean_ratio", "stderr_ratio",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs; JSON round-trips via to/from_dict.

    ``delta`` may be a single fraction or a sweep of fractions; each value
    gets its own block of trials and its own summary row.
    """

    kind: str
    n_left: int
    n_right: int
    budget: float
    trials: int
    seed: int
    delta: tuple = (1.0,)
    value_range: tuple = (0.0, 20.0)
    bid_range: tuple = (0.0, 5.0)
    t_fraction: float = 1.0 / math.e
    baseline: str = "threshold"
    enforce_cost: bool = True
    algo: str = "on-truth"
    out: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", str(self.kind))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        deltas = self.delta
        if isinstance(deltas, (int, float)):
            deltas = (float(deltas),)
        deltas = tuple(float(d) for d in deltas)
        if not deltas or any(not 0 < d <= 1 for d in deltas):
            raise ValueError("delta values must lie in (0, 1]")
        object.__setattr__(self, "delta", deltas)
        for name in ("value_range", "bid_range"):
            lo, hi = getattr(self, name)
            if not (0 <= lo < hi):
                raise ValueError(f"{name} must satisfy 0 <= lo < hi, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_left < 1 or self.n_right < 1:
            raise ValueError("n_left and n_right must be >= 1")
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        baseline = {"threshold-offline": "threshold"}.get(self.baseline, self.baseline)
        if baseline not in BASELINES:
            raise ValueError(f"baseline must be one of {BASELINES}")
        object.__setattr__(self, "baseline", baseline)
        if self.algo not in ALGOS:
            raise ValueError(f"algo must be one of {ALGOS}")
        if self.kind == "knapsack" and self.bid_range[1] > self.budget:
            raise ValueError(
                "knapsack weights (bid_range) may not exceed the budget"
            )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["delta"] = list(self.delta)
        data["value_range"] = list(self.value_range)
        data["bid_range"] = list(self.bid_range)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        for name in ("delta", "value_range", "bid_range"):
            if name in data and isinstance(data[name], list):
                data[name] = tuple(data[name])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _positive_uniform(gen: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    """Uniform draws forced strictly positive (bids and values must be > 0)."""
    draws = gen.uniform(lo, hi, size)
    floor = np.nextafter(lo, hi) if lo == 0 else lo
    return np.maximum(draws, floor)


def gen_d2d_instance(cfg: ExperimentConfig, rng: RngStream, delta: Optional[float] = None) -> BipartiteInstance:
    """Bipartite instance for the relay-assignment scenario.

    Each of the ``n_left`` helpers reaches a uniformly random
    ceil(delta * n_right) subset of the ``n_right`` seekers.  A helper's
    utility is drawn once from ``value_range`` and shared by all its edges
    (helpers differ in how useful they are, not in whom they serve), and its
    bid is drawn from ``bid_range``.  With per-pair utility draws instead,
    the offline matching's rewards concentrate at the top of the range as
    delta grows and the decision phase starves; the shared-utility model is
    the one whose competitive ratio improves with connectivity.
    """
    if cfg.kind not in ("d2d", "matching"):
        raise ValueError(f"config kind is {cfg.kind!r}, expected d2d or matching")
    delta = cfg.delta[0] if delta is None else float(delta)
    if delta * cfg.n_right < 1:
        raise ValueError(f"delta * n_right must be >= 1, got {delta * cfg.n_right}")
    degree = math.ceil(delta * cfg.n_right)
    gen = rng.generator()
    bids = _positive_uniform(gen, *cfg.bid_range, cfg.n_left)
    values = _positive_uniform(gen, *cfg.value_range, cfg.n_left)
    lefts = [LeftVertex(i, float(bids[i])) for i in range(cfg.n_left)]
    edges = []
    for i in range(cfg.n_left):
        rights = np.sort(gen.choice(cfg.n_right, size=degree, replace=False))
        edges.extend(Edge(i, int(r), float(values[i])) for r in rights)
    return BipartiteInstance(lefts, cfg.n_right, edges, cfg.budget)


def gen_knapsack_instance(
    cfg: ExperimentConfig,
    rng: RngStream,
    max_attempts: int = 100,
) -> KnapsackInstance:
    """Knapsack instance with independent uniform values and weights.

    Resamples until no single item is worth more than a tenth of the offline
    benchmark (the large-market condition), then gives up with a
    GenerationError; tightly dominated configurations, e.g. two items where
    one carries almost all the value, always exhaust the attempts.
    """
    if cfg.kind != "knapsack":
        raise ValueError(f"config kind is {cfg.kind!r}, expected knapsack")
    for attempt in range(max_attempts):
        gen = rng.derive(f"attempt:{attempt}").generator()
        values = _positive_uniform(gen, *cfg.value_range, cfg.n_left)
        weights = _positive_uniform(gen, *cfg.bid_range, cfg.n_left)
        inst = KnapsackInstance(
            (Item(i, float(values[i]), float(weights[i])) for i in range(cfg.n_left)),
            cfg.budget,
        )
        graph = knapsack_to_bipartite(inst)
        if cfg.baseline == "exact" and cfg.n_left <= 12:
            bench = evaluate(brute_force_opt(graph), graph).value
        else:
            bench = evaluate(threshold(graph).matching, graph).value
        if bench > 0 and values.max() / bench <= 0.1:
            return inst
    raise GenerationError(
        f"could not satisfy the large-market condition in {max_attempts} attempts"
    )


def competitive_ratio(online_value: float, baseline_value: float) -> float:
    if not baseline_value > 0:
        raise ValueError(f"baseline value must be positive, got {baseline_value}")
    return online_value / baseline_value


def _baseline_value(graph: BipartiteInstance, baseline: str) -> float:
    if baseline == "exact":
        return evaluate(brute_force_opt(graph), graph).value
    return evaluate(threshold(graph).matching, graph).value


def run_trial(cfg: ExperimentConfig, delta: float, trial: int) -> dict:
    """One fully seeded trial: generate, draw an order, run, compare."""
    stream = RngStream(cfg.seed).derive(f"delta:{delta:g}").derive(f"trial:{trial}")
    if cfg.kind == "knapsack":
        graph = knapsack_to_bipartite(
            gen_knapsack_instance(cfg, stream.derive("instance"))
        )
    else:
        graph = gen_d2d_instance(cfg, stream.derive("instance"), delta)
    order = ArrivalOrder.uniform(graph.left_ids, stream.derive("order"))
    n = len(graph.lefts)
    t_cfg = round(n * cfg.t_fraction)

    payments_total = 0.0
    if cfg.algo == "on":
        out = run_on(graph, order, t_cfg, cfg.enforce_cost)
        online_value, spend, feasible = out.value, out.spend, out.feasible
        gamma, t_used = out.gamma_used, out.t_used
    elif cfg.algo == "on-truth":
        out = run_on_truth(graph, order, stream.derive("coins"), cfg.enforce_cost)
        online_value, spend, feasible = out.value, out.spend, out.feasible
        gamma, t_used = out.gamma_used, out.t_used
        payments_total = float(sum(out.payments))
    elif cfg.algo == "virtual":
        chosen = run_virtual(graph, order, t_cfg)
        cols = graph._cols
        value_of = {int(i): float(v) for i, v in zip(cols.left_ids, cols.left_value)}
        online_value = float(sum(value_of[i] for i in chosen))
        spend = float(sum(graph.bid_of(i) for i in chosen))
        feasible = spend <= graph.budget + 1e-9
        gamma = threshold(graph.subgraph(order.order[:t_cfg]), graph.budget).gamma
        t_used = t_cfg
    elif cfg.algo == "threshold":
        res = threshold(graph)
        online_value, spend = evaluate(res.matching, graph)
        feasible, gamma, t_used = spend <= graph.budget + 1e-9, res.gamma, 0
    elif cfg.algo == "greedy":
        m = greedy_matching(graph)
        online_value, spend = evaluate(m, graph)
        feasible, gamma, t_used = spend <= graph.budget + 1e-9, math.inf, 0
    elif cfg.algo == "exact":
        m = brute_force_opt(graph)
        online_value, spend = evaluate(m, graph)
        feasible, gamma, t_used = spend <= graph.budget + 1e-9, math.inf, 0
    else:  # pragma: no cover - rejected by config validation
        raise ValueError(cfg.algo)

    baseline_value = _baseline_value(graph, cfg.baseline)
    return {
        "kind": cfg.kind,
        "delta": delta,
        "trial": trial,
        "seed": cfg.seed,
        "algo": cfg.algo,
        "baseline": cfg.baseline,
        "n_left": cfg.n_left,
        "n_right": graph.right_count,
        "budget": cfg.budget,
        "online_value": online_value,
        "baseline_value": baseline_value,
        "ratio": competitive_ratio(online_value, baseline_value),
        "spend": spend,
        "payments_total": payments_total,
        "feasible": feasible,
        "gamma": gamma,
        "t": t_used,
    }


def _trial_task(args):
    cfg, delta, trial = args
    return run_trial(cfg, delta, trial)


def run_experiment(cfg: ExperimentConfig, workers: int = 1):
    """Run every (delta, trial) cell; returns (rows, summaries) and writes
    them to ``cfg.out`` (plus a sibling ``.summary.csv``) when set.

    Rows are sorted by (delta, trial) before writing, and every random draw
    comes from a per-trial stream, so reruns and parallel runs are
    byte-identical.
    """
    tasks = [(cfg, d, k) for d in cfg.delta for k in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_trial_task, tasks, chunksize=8))
    else:
        rows = [_trial_task(t) for t in tasks]
    rows.sort(key=lambda r: (r["delta"], r["trial"]))

    summaries = []
    for d in cfg.delta:
        ratios = np.array([r["ratio"] for r in rows if r["delta"] == d])
        stderr = float(ratios.std(ddof=1) / math.sqrt(ratios.size)) if ratios.size > 1 else 0.0
        summaries.append(
            {
                "kind": cfg.kind,
                "delta": d,
                "trials": int(ratios.size),
                "algo": cfg.algo,
                "baseline": cfg.baseline,
                "mean_ratio": float(ratios.mean()),
                "stderr_ratio": stderr,
            }
        )
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(rows_to_csv(rows, CSV_COLUMNS))
        with open(summary_path(cfg.out), "w") as fh:
            fh.write(rows_to_csv(summaries, SUMMARY_COLUMNS))
    return rows, summaries


def _csv_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_csv_cell(row[c]) for c in columns) for row in rows)
    return "\n".join(lines) + "\n"


def summary_path(out_path: str) -> str:
    base = str(out_path)
    if base.endswith(".csv"):
        base = base[: -len(".csv")]
    return base + ".summary.csv"
