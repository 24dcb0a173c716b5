"""Command line entry point.

    kvadapt bench run --scenario mutation --sizes 10,20,40,80 --reps 300 --out DIR
    kvadapt bench ratios DIR
    kvadapt learn --target t1.dfa --tree t0.json --save-tree t1.json
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .automata import exact_counterexample, load_dfa, dumps_dfa
from .ctree import load_tree, save_tree
from .errors import KvError, ParseError
from .learners import incremental_kv
from .oracles import CountingOracle, EqConfig, ExactEquivalence, RandomWordEquivalence

log = logging.getLogger("kvadapt")

# flag name -> (config key, parser)
BENCH_KEYS = {
    "scenario": str,
    "sizes": str,
    "reps": int,
    "alpha": float,
    "switch": int,
    "seed": int,
    "out": str,
    "eq-attempts": int,
    "eq-mean-len": float,
    "parallel": int,
    "alphabet-size": int,
}
BENCH_DEFAULTS = {
    "scenario": "mutation",
    "sizes": "10,20,40,80",
    "reps": 300,
    "alpha": 0.999,
    "switch": 10_000,
    "seed": 0,
    "out": None,
    "eq-attempts": EqConfig.max_attempts,
    "eq-mean-len": EqConfig.expected_length,
    "parallel": 1,
    "alphabet-size": 2,
}


def read_config(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("_", "-")
        if not sep or key not in BENCH_KEYS:
            raise ParseError(f"{path}: unknown or malformed setting {raw.strip()!r}", no, 1)
        try:
            values[key] = BENCH_KEYS[key](value.strip())
        except ValueError:
            raise ParseError(f"{path}: bad value for {key}", no, len(key) + 1) from None
    return values


def scenario_config(args) -> bench.ScenarioConfig:
    settings = dict(BENCH_DEFAULTS)
    if args.config:
        settings.update(read_config(args.config))
    for key in BENCH_KEYS:
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            settings[key] = value
    return bench.ScenarioConfig(
        scenario=settings["scenario"].replace("-", "_"),
        sizes=tuple(int(s) for s in str(settings["sizes"]).split(",") if s.strip()),
        alphabet_size=settings["alphabet-size"],
        repetitions=settings["reps"],
        switch_point=settings["switch"],
        alpha=settings["alpha"],
        eq=EqConfig(settings["eq-attempts"], settings["eq-mean-len"]),
        seed=settings["seed"],
        out=settings["out"],
        parallel=settings["parallel"],
    )


def cmd_bench_run(args) -> int:
    config = scenario_config(args)
    if config.out is None:
        raise KvError("an output directory is required (--out or 'out =' in the config)")
    log.info("running %s: sizes=%s reps=%d", config.scenario, config.sizes, config.repetitions)
    records, _, ratios = bench.run_benchmark(config)
    failed = sum(not r.converged for r in records)
    print(f"wrote {config.out} ({len(records)} runs, {failed} non-converged)")
    for point in ratios[config.scenario]:
        print(f"{point.size} {point.ratio:.6g}")
    return 0


def cmd_bench_ratios(args) -> int:
    records = bench.load_records(args.dir)
    if not records:
        raise KvError(f"no records.jsonl files under {args.dir}")
    _, ratios = bench.aggregate(records)
    for scenario, points in sorted(ratios.items()):
        print(f"# {scenario}")
        for point in points:
            print(f"{point.size} {point.ratio:.6g}")
    return 0


def cmd_learn(args) -> int:
    target = load_dfa(args.target)
    prev = load_tree(args.tree) if args.tree else None
    mq = CountingOracle(target)
    if args.exact:
        eq = ExactEquivalence(target)
    else:
        eq = RandomWordEquivalence(mq, EqConfig(args.eq_attempts, args.eq_mean_len, args.seed))
    hyp, tree = incremental_kv(target.alphabet, prev, mq, eq)
    sys.stdout.write(dumps_dfa(hyp))
    correct = exact_counterexample(hyp, target) is None
    print(f"# queries {mq.counter.count}", file=sys.stderr)
    print(f"# states {hyp.n_states}", file=sys.stderr)
    print(f"# equivalent {'yes' if correct else 'no'}", file=sys.stderr)
    if args.save_tree:
        save_tree(tree, args.save_tree)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kvadapt", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    bench_p = sub.add_parser("bench", help="evolving-target experiments")
    bench_sub = bench_p.add_subparsers(dest="bench_command", required=True)
    run = bench_sub.add_parser("run", help="run one scenario and write .dat files")
    run.add_argument("--config", help="key = value file; flags override it")
    run.add_argument("--scenario", choices=["mutation", "feature-add", "feature_add"])
    run.add_argument("--sizes", help="comma separated minimal state counts (default %(default)s)")
    run.add_argument("--reps", type=int)
    run.add_argument("--alpha", type=float)
    run.add_argument("--switch", type=int, help="queries answered by t0 before the switch")
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--eq-attempts", type=int)
    run.add_argument("--eq-mean-len", type=float)
    run.add_argument("--parallel", type=int)
    run.add_argument("--alphabet-size", type=int)
    run.set_defaults(func=cmd_bench_run)
    ratios = bench_sub.add_parser("ratios", help="recompute query ratios from a run directory")
    ratios.add_argument("dir")
    ratios.set_defaults(func=cmd_bench_ratios)

    learn = sub.add_parser("learn", help="learn one DFA file, optionally from a saved tree")
    learn.add_argument("--target", required=True)
    learn.add_argument("--tree", help="classification tree JSON from a previous session")
    learn.add_argument("--save-tree", help="where to write the final tree")
    learn.add_argument("--exact", action="store_true", help="use a perfect equivalence oracle")
    learn.add_argument("--eq-attempts", type=int, default=EqConfig.max_attempts)
    learn.add_argument("--eq-mean-len", type=float, default=EqConfig.expected_length)
    learn.add_argument("--seed", type=int, default=0)
    learn.set_defaults(func=cmd_learn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (KvError, OSError) as exc:
        print(f"kvadapt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
