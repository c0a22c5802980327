"""Command line interface: gen, run, experiment, verify."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .core import (
    ArrivalOrder,
    KnapsackInstance,
    RngStream,
    evaluate,
    knapsack_to_bipartite,
    load_instance,
    save_instance,
)
from .harness import (
    ExperimentConfig,
    gen_d2d_instance,
    gen_knapsack_instance,
    run_experiment,
)
from .offline import brute_force_opt, greedy_matching, threshold
from .online_knapsack import run_on, run_virtual
from .truthful import run_on_truth


def _parse_range(text: str):
    lo, hi = (float(x) for x in text.split(","))
    return (lo, hi)


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _parse_deltas(text: str):
    return tuple(float(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secmatch",
        description="Budgeted online matching and knapsack selection harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--kind", choices=("knapsack", "d2d", "matching"), required=True)
    gen.add_argument("--n-left", type=int, default=50)
    gen.add_argument("--n-right", type=int, default=100)
    gen.add_argument("--budget", type=float, default=100.0)
    gen.add_argument("--delta", type=float, default=0.5)
    gen.add_argument("--value-range", type=_parse_range, default=(0.0, 20.0))
    gen.add_argument("--bid-range", type=_parse_range, default=(0.0, 5.0))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run one algorithm on one instance")
    run.add_argument("--instance", required=True)
    run.add_argument(
        "--algo",
        choices=("on", "virtual", "on-truth", "threshold", "greedy", "exact"),
        default="on",
    )
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--t-fraction", type=float, default=1.0 / math.e)
    run.add_argument("--enforce-cost", type=_parse_bool, default=True)
    run.add_argument("--out", default=None)

    exp = sub.add_parser("experiment", help="config-driven sweep writing CSV")
    exp.add_argument("--config", required=True)
    exp.add_argument("--out", default=None, help="override the config's output path")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--trials", type=int, default=None)
    exp.add_argument("--delta", type=_parse_deltas, default=None)
    exp.add_argument("--algo", default=None)
    exp.add_argument("--baseline", default=None)
    exp.add_argument("--t-fraction", type=float, default=None)
    exp.add_argument("--enforce-cost", type=_parse_bool, default=None)
    exp.add_argument("--workers", type=int, default=1)

    ver = sub.add_parser("verify", help="run the lemma property suites")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--quick", action="store_true")
    return parser


def _cmd_gen(args) -> int:
    cfg = ExperimentConfig(
        kind=args.kind,
        n_left=args.n_left,
        n_right=args.n_right,
        budget=args.budget,
        trials=1,
        seed=args.seed,
        delta=args.delta,
        value_range=args.value_range,
        bid_range=args.bid_range,
    )
    rng = RngStream(args.seed, "gen")
    if args.kind == "knapsack":
        inst = gen_knapsack_instance(cfg, rng)
    else:
        inst = gen_d2d_instance(cfg, rng)
    save_instance(inst, args.out)
    print(f"wrote {args.kind} instance to {args.out}")
    return 0


def _cmd_run(args) -> int:
    inst = load_instance(args.instance)
    if isinstance(inst, KnapsackInstance):
        inst = knapsack_to_bipartite(inst)
    stream = RngStream(args.seed, "run")
    order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
    n = len(inst.lefts)
    t = round(n * args.t_fraction)
    if args.algo == "on":
        result = run_on(inst, order, t, args.enforce_cost).to_dict()
    elif args.algo == "on-truth":
        result = run_on_truth(
            inst, order, stream.derive("coins"), args.enforce_cost
        ).to_dict()
    elif args.algo == "virtual":
        chosen = sorted(run_virtual(inst, order, t))
        result = {"selected_lefts": chosen, "t": t}
    elif args.algo == "threshold":
        res = threshold(inst)
        value, spend = evaluate(res.matching, inst)
        result = {
            "selected": [[e.left, e.right, e.value] for e in res.matching],
            "value": value, "spend": spend, "gamma": res.gamma,
        }
    else:
        m = greedy_matching(inst) if args.algo == "greedy" else brute_force_opt(inst)
        value, spend = evaluate(m, inst)
        result = {
            "selected": [[e.left, e.right, e.value] for e in m],
            "value": value, "spend": spend,
        }
    text = json.dumps(result, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_experiment(args) -> int:
    data = ExperimentConfig.from_json(args.config).to_dict()
    overrides = {
        "out": args.out, "seed": args.seed, "trials": args.trials,
        "delta": args.delta, "algo": args.algo, "baseline": args.baseline,
        "t_fraction": args.t_fraction, "enforce_cost": args.enforce_cost,
    }
    for key, val in overrides.items():
        if val is not None:
            data[key] = val
    cfg = ExperimentConfig.from_dict(data)
    _rows, summaries = run_experiment(cfg, workers=args.workers)
    for s in summaries:
        print(
            f"delta={s['delta']}: mean ratio {s['mean_ratio']:.4f} "
            f"(stderr {s['stderr_ratio']:.4f}, {s['trials']} trials)"
        )
    if cfg.out:
        print(f"wrote {cfg.out}")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(seed=args.seed, quick=args.quick)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "experiment": _cmd_experiment,
        "verify": _cmd_verify,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
