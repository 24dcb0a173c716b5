"""Evolving-target experiments comparing classic and incremental learning.

One run draws a random minimal target ``t0`` and an evolved version ``t1``
(mutation or feature-add scenario). The system answers as ``t0`` for the
first ``switch_point`` membership queries and as ``t1`` afterwards. Both
learners see the same pair and the same random equivalence-search stream:

* classic learns ``t0`` and then ``t1`` from scratch;
* incremental learns ``t0`` and then restarts from its pruned tree.

Progress against the current target is sampled whenever a learner emits a
hypothesis. The headline number is the count of queries, after the switch,
until the final hypothesis for ``t1`` was emitted.
"""

from __future__ import annotations

import json
import os
import string
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .automata import Dfa, apply_feature_add, apply_mutation_scenario, exact_counterexample, minimize, random_dfa
from .errors import AggregationError, InputError, ParseError
from .learners import classic_kv, incremental_kv
from .metrics import progress
from .oracles import CountingOracle, EqConfig, EvolvingTarget, QueryCounter, RandomWordEquivalence

SCENARIOS = {"mutation": 1, "feature_add": 2}
SCENARIO_TAGS = {"mutation": "mut", "feature_add": "feat"}
KINDS = ("classic", "incremental")
GRID_STEP = 100


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "mutation"
    sizes: tuple = (10, 20, 40, 80)
    alphabet_size: int = 2
    repetitions: int = 300
    switch_point: int = 10_000
    alpha: float = 0.999
    eq: EqConfig = field(default_factory=EqConfig)
    seed: int = 0
    out: Optional[str] = None
    parallel: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InputError(f"unknown scenario {self.scenario!r}; expected one of {sorted(SCENARIOS)}")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or min(self.sizes) < 2:
            raise InputError("sizes must be at least 2")
        if self.repetitions < 1:
            raise InputError("repetitions must be at least 1")
        if self.switch_point < 1:
            raise InputError("switch_point must be at least 1")
        if not 1 <= self.alphabet_size <= 26:
            raise InputError("alphabet_size must be between 1 and 26")
        if not 0 < self.alpha < 1:
            raise InputError("alpha must lie strictly between 0 and 1")

    @property
    def alphabet(self) -> str:
        return string.ascii_lowercase[: self.alphabet_size]


@dataclass
class RunRecord:
    scenario: str
    size: int
    repetition: int
    seed: int
    kind: str
    checkpoints: list
    converged: bool
    queries_to_final_t1: Optional[int] = None
    phase1_queries: Optional[int] = None
    t0_states: Optional[int] = None
    t1_states: Optional[int] = None
    failure: Optional[str] = None

    @property
    def first_post_switch_progress(self) -> Optional[float]:
        for _, value, phase in self.checkpoints:
            if phase == 2:
                return value
        return None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        d = json.loads(text)
        d["checkpoints"] = [tuple(c) for c in d["checkpoints"]]
        return cls(**d)


def run_seed(master: int, scenario: str, size: int, repetition: int) -> int:
    """Per-run seed, a pure function of the config coordinates."""
    seq = np.random.SeedSequence([int(master), SCENARIOS[scenario], int(size), int(repetition)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_pair(scenario: str, size: int, rng, alphabet: str = "ab"):
    """``(t0, t1)``: a random minimal target and its evolved version (not minimized)."""
    if size < 2:
        raise InputError("size must be at least 2")
    rng = np.random.default_rng(rng)
    t0 = random_dfa(size, alphabet, rng)
    if scenario == "mutation":
        t1 = apply_mutation_scenario(t0, rng)
    elif scenario == "feature_add":
        t1 = apply_feature_add(t0, rng)
    else:
        raise InputError(f"unknown scenario {scenario!r}")
    return t0, t1


class NonConvergence(Exception):
    """Random search found no counterexample although the hypothesis is wrong."""


class BenchEquivalence:
    """Random-word equivalence with an uncounted exactness check in front.

    The exact check lets the run stop at the truly final hypothesis; a
    random search that then comes back empty means the run did not
    converge.
    """

    def __init__(self, mq: CountingOracle, cfg: EqConfig, rng):
        self.mq = mq
        self.search = RandomWordEquivalence(mq, cfg, rng)

    def __call__(self, hyp: Dfa) -> Optional[str]:
        if exact_counterexample(hyp, self.mq.current_target) is None:
            return None
        word = self.search(hyp)
        if word is None:
            raise NonConvergence(f"no counterexample within {self.search.cfg.max_attempts} words")
        return word


def run_session(kind: str, t0: Dfa, t1: Dfa, config: ScenarioConfig, seed: int = 0, *, repetition: int = 0):
    """Learn ``t0`` then ``t1`` with one learner kind; see the module docstring.

    Checkpoints are ``(queries, progress, phase)`` triples. If phase 1 ends
    before the switch point the counter idles up to it, so phase 2 always
    starts at ``switch_point``.
    """
    if kind not in KINDS:
        raise InputError(f"unknown learner kind {kind!r}")
    alphabet = t0.alphabet
    switch = config.switch_point
    counter = QueryCounter()
    mq = CountingOracle(EvolvingTarget([t0, t1], [switch]), counter)
    eq = BenchEquivalence(mq, config.eq, np.random.default_rng([seed, 1]))
    record = RunRecord(
        config.scenario, t0.n_states, repetition, seed, kind, [], False,
        t0_states=minimize(t0).n_states, t1_states=minimize(t1).n_states,
    )
    phase = [1, t0]

    def checkpoint(hyp, event):
        point = (event.queries, progress(phase[1], hyp, config.alpha), phase[0])
        if record.checkpoints and record.checkpoints[-1][0] == point[0]:
            record.checkpoints[-1] = point
        else:
            record.checkpoints.append(point)

    try:
        if kind == "classic":
            classic_kv(alphabet, mq, eq, on_hypothesis=checkpoint)
            tree = None
        else:
            _, tree = incremental_kv(alphabet, None, mq, eq, on_hypothesis=checkpoint)
    except NonConvergence as exc:
        record.failure = f"phase 1: {exc}"
        return record
    record.phase1_queries = counter.count
    if counter.count > switch:
        record.failure = f"phase 1 used {counter.count} queries, past the switch point"
        return record
    counter.advance_to(switch)
    phase[:] = [2, t1]
    try:
        if kind == "classic":
            classic_kv(alphabet, mq, eq, on_hypothesis=checkpoint)
        else:
            incremental_kv(alphabet, tree, mq, eq, on_hypothesis=checkpoint)
    except NonConvergence as exc:
        record.failure = f"phase 2: {exc}"
        return record
    record.converged = True
    record.queries_to_final_t1 = record.checkpoints[-1][0] - switch
    return record


def _run_repetition(args):
    config, size, rep = args
    seed = run_seed(config.seed, config.scenario, size, rep)
    t0, t1 = make_pair(config.scenario, size, np.random.default_rng([seed, 0]), config.alphabet)
    return [run_session(kind, t0, t1, config, seed, repetition=rep) for kind in KINDS]


def run_records(config: ScenarioConfig) -> list:
    """All run records for ``config``, in (size, repetition, kind) order."""
    tasks = [(config, size, rep) for size in config.sizes for rep in range(config.repetitions)]
    if config.parallel > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            chunks = list(pool.map(_run_repetition, tasks, chunksize=4))
    else:
        chunks = [_run_repetition(t) for t in tasks]
    return [r for chunk in chunks for r in chunk]


# -- aggregation ------------------------------------------------------------------


def resample(checkpoints, grid) -> np.ndarray:
    """Step function through ``checkpoints`` evaluated on ``grid``.

    Each grid point takes the last checkpoint at or before it; points before
    the first checkpoint take the first value.
    """
    qs = np.array([c[0] for c in checkpoints])
    ps = np.array([c[1] for c in checkpoints])
    idx = np.searchsorted(qs, grid, side="right") - 1
    return ps[np.maximum(idx, 0)]


@dataclass(frozen=True)
class RatioPoint:
    size: int
    ratio: float


def mean_curve(records, step: int = GRID_STEP) -> list:
    if not records:
        raise AggregationError("cannot average an empty set of runs")
    end = max(r.checkpoints[-1][0] for r in records)
    grid = np.arange(0, (end // step + 1) * step + 1, step)
    values = np.mean([resample(r.checkpoints, grid) for r in records], axis=0)
    return list(zip(grid.tolist(), values.tolist()))


def aggregate(records, step: int = GRID_STEP):
    """Average progress curves and query ratios over converged runs.

    Returns ``(curves, ratios)``: ``curves[(scenario, size, kind)]`` is a list
    of ``(queries, mean progress)`` pairs on a grid of spacing ``step`` and
    ``ratios[scenario]`` a list of :class:`RatioPoint` sorted by size.
    Ratios compare matched repetitions only: a repetition where either
    learner failed to converge is left out for both.
    """
    cells = {}
    for r in records:
        cells.setdefault((r.scenario, r.size, r.kind), []).append(r)
    curves = {}
    for key, runs in sorted(cells.items()):
        ok = [r for r in runs if r.converged]
        if not ok:
            raise AggregationError(f"no converged runs for scenario={key[0]} size={key[1]} kind={key[2]}")
        curves[key] = mean_curve(ok, step)
    ratios = {}
    for scenario, size in sorted({(s, n) for s, n, _ in cells}):
        by_rep = {}
        for kind in KINDS:
            if (scenario, size, kind) not in cells:
                raise AggregationError(f"no runs for scenario={scenario} size={size} kind={kind}")
            for r in cells[(scenario, size, kind)]:
                by_rep.setdefault((r.repetition, r.seed), {})[kind] = r
        pairs = [
            (d["incremental"].queries_to_final_t1, d["classic"].queries_to_final_t1)
            for d in by_rep.values()
            if len(d) == len(KINDS) and all(r.converged for r in d.values())
        ]
        if not pairs:
            raise AggregationError(f"no matched converged pair for scenario={scenario} size={size}")
        inc, cls = np.mean(pairs, axis=0)
        if cls <= 0:
            raise AggregationError(f"classic mean is zero for scenario={scenario} size={size}")
        ratios.setdefault(scenario, []).append(RatioPoint(size, float(inc / cls)))
    return curves, ratios


# -- files --------------------------------------------------------------------------


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_dat(series) -> str:
    pairs = [(p.size, p.ratio) if isinstance(p, RatioPoint) else tuple(p) for p in series]
    if not pairs:
        raise InputError("refusing to write an empty series")
    pairs.sort(key=lambda p: p[0])
    for (a, _), (b, _) in zip(pairs, pairs[1:]):
        if not b > a:
            raise InputError(f"x values must be strictly increasing, got {a} then {b}")
    return "".join(f"{x:.6g} {y:.6g}\n" for x, y in pairs)


def emit_dat(series, path) -> None:
    """Write ``x y`` lines (6 significant digits, sorted by x)."""
    _atomic_write(path, format_dat(series))


def parse_dat(path) -> list:
    out = []
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParseError(f"expected two columns in {path}", no, 1)
        try:
            out.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ParseError(f"bad number in {path}", no, 1) from None
    return out


def summary_text(config: ScenarioConfig, records, ratios) -> str:
    lines = [f"scenario {config.scenario}", f"alpha {config.alpha:g}", f"switch {config.switch_point}", ""]
    lines.append("size kind runs converged mean_queries_t1 mean_first_post_switch_progress")
    for size in config.sizes:
        for kind in KINDS:
            runs = [r for r in records if r.size == size and r.kind == kind]
            ok = [r for r in runs if r.converged]
            mean_q = np.mean([r.queries_to_final_t1 for r in ok]) if ok else float("nan")
            first = [r.first_post_switch_progress for r in ok]
            mean_p = np.mean(first) if ok else float("nan")
            lines.append(f"{size} {kind} {len(runs)} {len(ok)} {mean_q:.6g} {mean_p:.6g}")
    lines.append("")
    lines.append("size ratio")
    for point in ratios.get(config.scenario, []):
        lines.append(f"{point.size} {point.ratio:.6g}")
    failures = [r for r in records if not r.converged]
    lines.append("")
    lines.append(f"non-converged {len(failures)} of {len(records)}")
    for r in failures:
        lines.append(f"  size={r.size} rep={r.repetition} kind={r.kind}: {r.failure}")
    return "\n".join(lines) + "\n"


def write_outputs(config: ScenarioConfig, records, out) -> dict:
    """Write the output tree for one scenario under ``out``::

        mut.dat                      size -> query ratio
        mut/size-10/classic.dat      mean progress curve per learner
        mut/summary.txt              means and non-convergence counts
        mut/records.jsonl            one RunRecord per line
    """
    out = Path(out)
    curves, ratios = aggregate(records)
    tag = SCENARIO_TAGS[config.scenario]
    for (scenario, size, kind), curve in curves.items():
        emit_dat(curve, out / tag / f"size-{size}" / f"{kind}.dat")
    emit_dat(ratios[config.scenario], out / f"{tag}.dat")
    _atomic_write(out / tag / "records.jsonl", "".join(r.to_json() + "\n" for r in records))
    _atomic_write(out / tag / "summary.txt", summary_text(config, records, ratios))
    return {"curves": curves, "ratios": ratios}


def run_benchmark(config: ScenarioConfig):
    """Run every repetition of ``config`` and write outputs if ``config.out`` is set.

    Returns ``(records, curves, ratios)``.
    """
    records = run_records(config)
    if config.out is not None:
        result = write_outputs(config, records, config.out)
    else:
        curves, ratios = aggregate(records)
        result = {"curves": curves, "ratios": ratios}
    return records, result["curves"], result["ratios"]


def load_records(directory) -> list:
    records = []
    for path in sorted(Path(directory).glob("*/records.jsonl")):
        for line in path.read_text().splitlines():
            if line.strip():
                records.append(RunRecord.from_json(line))
    return records
