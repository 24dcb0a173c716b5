"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (shown in the terminal summary and
printed to stdout) and then asserts, so a failing criterion fails the run.
"""

import itertools
import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from kvadapt.automata import apply_mutation_scenario, exact_counterexample, complement, minimize, random_dfa
from kvadapt.bench import KINDS, ScenarioConfig, run_benchmark
from kvadapt.ctree import ClassificationTree, invariant_violations, load_tree, minimize_tree, save_tree, sift
from kvadapt.learners import LearnerSession
from kvadapt.metrics import progress, progress_truncated
from kvadapt.oracles import ExactEquivalence

N_TARGETS = 200
SEED = 0


def report(number, title, ok, detail):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def learn(alphabet, target, prev=None, incremental=False, check=None):
    """Run one session with an exact oracle, calling ``check(session)`` at
    every hypothesis."""
    session = LearnerSession(
        alphabet, target.accepts, ExactEquivalence(target),
        on_hypothesis=None if check is None else (lambda hyp, ev: check(session)),
    )
    hyp = session.run(prev, incremental)
    return hyp, session


def suite():
    """Random minimal targets, sizes 2..40, alphabets of 2 and 3 symbols."""
    rng = np.random.default_rng(SEED)
    for i in range(N_TARGETS):
        alphabet = "ab" if i % 2 == 0 else "abc"
        n = int(rng.integers(2, 41))
        yield alphabet, random_dfa(n, alphabet, rng), rng


@pytest.fixture(scope="module")
def learned():
    """Criterion 1 and 2 share one pass over the random suite."""
    out = {"errors": [], "violations": 0, "bad_growth": 0, "checks": 0, "trees": []}
    start = time.perf_counter()

    for alphabet, t0, rng in suite():
        n = t0.n_states
        h, _ = learn(alphabet, t0)
        if exact_counterexample(h, t0) is not None or h.n_states != n:
            out["errors"].append(f"classic n={n}")

        # leaf count by emission: 1 for the trivial hypothesis, then +1 per round
        leaves = []

        def check(session, target=t0, leaves=leaves):
            out["checks"] += 1
            out["violations"] += len(invariant_violations(session.tree, target.accepts)) if session.tree else 0
            leaves.append(session.tree.n_leaves() if session.tree else 1)

        h, s = learn(alphabet, t0, None, True, check)
        if exact_counterexample(h, t0) is not None or h.n_states != n:
            out["errors"].append(f"incremental n={n}")
        growth = np.diff(leaves[1:])
        out["bad_growth"] += int((growth != 1).sum())
        tree0 = s.tree

        t1 = minimize(apply_mutation_scenario(t0, rng))
        leaves = []
        h, s = learn(alphabet, t1, tree0, True, lambda session: check(session, t1, leaves))
        if exact_counterexample(h, t1) is not None or h.n_states != t1.n_states:
            out["errors"].append(f"incremental re-run n={n}")
        out["bad_growth"] += int((np.diff(leaves) != 1).sum())
        out["trees"].append(tree0)
    out["seconds"] = time.perf_counter() - start
    return out


def test_criterion_1_learner_correctness(learned):
    ok = not learned["errors"] and learned["seconds"] < 120
    detail = (
        f"{N_TARGETS} targets x 3 sessions, {len(learned['errors'])} wrong results, "
        f"{learned['seconds']:.1f}s (limit 120s)"
    )
    assert report(1, "exact learning of random minimal targets", ok, detail), learned["errors"][:5]


def test_criterion_2_tree_invariants(learned):
    ok = learned["violations"] == 0 and learned["bad_growth"] == 0
    detail = (
        f"{learned['checks']} trees checked, {learned['violations']} leaf/ancestor violations, "
        f"{learned['bad_growth']} rounds not adding exactly one leaf"
    )
    assert report(2, "classification tree invariants", ok, detail)


def test_criterion_3_minimize_tree_fixpoint():
    rng = np.random.default_rng(SEED + 1)
    unsifted = undistinguished = pruned = kept = 0
    for i in range(100):
        alphabet = "ab" if i % 2 == 0 else "abc"
        t0 = random_dfa(int(rng.integers(5, 41)), alphabet, rng)
        t1 = apply_mutation_scenario(t0, rng)
        _, s = learn(alphabet, t0)
        mq = t1.accepts
        tree = minimize_tree(s.tree, mq)
        pruned += s.tree.n_leaves() - tree.n_leaves()
        kept += tree.n_leaves()
        unsifted += sum(sift(tree, mq, tree.label(l)) != l for l in tree.leaves())
        for la, lb in itertools.combinations(tree.leaves(), 2):
            e = tree.label(tree.lca(la, lb))
            undistinguished += mq(tree.label(la) + e) == mq(tree.label(lb) + e)
    ok = unsifted == 0 and undistinguished == 0
    detail = (
        f"100 mutation pairs, {kept} leaves kept, {pruned} pruned; "
        f"{unsifted} not self-sifting, {undistinguished} pairs not separated by their lca"
    )
    assert report(3, "minimizeTree fixpoint", ok, detail)


def test_criterion_4_progress_exactness():
    rng = np.random.default_rng(SEED + 2)
    worst_trunc = worst_self = worst_part = 0.0
    for _ in range(100):
        alphabet = "ab" if rng.random() < 0.5 else "abc"
        t = random_dfa(int(rng.integers(1, 11)), alphabet, rng)
        h = random_dfa(int(rng.integers(1, 11)), alphabet, rng)
        worst_trunc = max(worst_trunc, abs(progress(t, h, 0.9) - progress_truncated(t, h, 0.9, 1e-6)))
        worst_self = max(worst_self, abs(progress(t, t, 0.9) - 1.0))
        for alpha in (0.9, 0.999):
            worst_part = max(worst_part, abs(progress(t, h, alpha) + progress(t, complement(h), alpha) - 1.0))
    ok = worst_trunc <= 1e-6 and worst_self == 0.0 and worst_part <= 1e-12
    detail = (
        f"max |exact - truncated| = {worst_trunc:.2e} (tol 1e-6), max |p(d,d) - 1| = {worst_self:.1e}, "
        f"max partition error = {worst_part:.2e} (tol 1e-12)"
    )
    assert report(4, "progress metric exactness", ok, detail)


BENCH = dict(sizes=(10, 20, 40, 80), repetitions=50, switch_point=10_000, alpha=0.999, seed=SEED)


@pytest.fixture(scope="module")
def desk_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    parallel = min(8, os.cpu_count() or 1)
    results = {}
    start = time.perf_counter()
    for scenario in ("mutation", "feature_add"):
        cfg = ScenarioConfig(scenario=scenario, out=str(out), parallel=parallel, **BENCH)
        results[scenario] = run_benchmark(cfg)
    return results, time.perf_counter() - start


def inversions(ratios):
    return [b.ratio - a.ratio for a, b in zip(ratios, ratios[1:]) if b.ratio > a.ratio]


def head_start(records):
    means = {}
    for kind in KINDS:
        runs = [r for r in records if r.kind == kind and r.converged]
        means[kind] = float(np.mean([r.first_post_switch_progress for r in runs]))
    return means


def test_criterion_5_desk_reproduction(desk_run):
    results, seconds = desk_run
    parts, ok = [], True
    for scenario, (records, _, ratios) in results.items():
        pts = ratios[scenario]
        a = all(p.ratio < 1.0 for p in pts if p.size >= 20)
        inv = inversions(pts)
        b = len(inv) == 0 or (len(inv) == 1 and inv[0] <= 0.05)
        hs = head_start(records)
        c = hs["incremental"] > hs["classic"]
        failed = sum(not r.converged for r in records)
        ok &= a and b and c
        parts.append(
            f"{scenario}: ratios " + " ".join(f"{p.size}:{p.ratio:.3f}" for p in pts)
            + f" (a){'ok' if a else 'FAIL'}"
            + f" (b){'ok' if b else 'FAIL'} inversions " + ("[" + ", ".join(f"{x:.3f}" for x in inv) + "]")
            + f" (c){'ok' if c else 'FAIL'} first progress inc {hs['incremental']:.3f} vs classic {hs['classic']:.3f}"
            + f"; {failed}/{len(records)} runs non-converged"
        )
    detail = "; ".join(parts) + f"; {seconds:.0f}s"
    assert report(5, "desk-scale evolving-target reproduction (reps=50, seed 0)", ok, detail)


def test_criterion_6_determinism_and_io(tmp_path):
    def dats(root):
        return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*.dat"))}

    same = True
    for scenario in ("mutation", "feature_add"):
        base = dict(scenario=scenario, sizes=(6, 12), repetitions=4, switch_point=3000, alpha=0.999, seed=7)
        first, second = tmp_path / f"{scenario}-1", tmp_path / f"{scenario}-2"
        run_benchmark(ScenarioConfig(out=str(first), **base))
        run_benchmark(ScenarioConfig(out=str(second), parallel=2, **base))
        a, b = dats(first), dats(second)
        same &= bool(a) and a == b
    rng = np.random.default_rng(SEED + 3)
    trips = 0
    round_trip = True
    for i in range(50):
        target = random_dfa(int(rng.integers(2, 30)), "abc", rng)
        _, s = learn("abc", target)
        path = tmp_path / f"tree{i}.json"
        save_tree(s.tree, path)
        back = load_tree(path)
        # ids are renumbered in pre-order; structure and labels must survive
        labels = [s.tree.label(n) for n in s.tree.nodes()]
        round_trip &= back == s.tree and [back.label(n) for n in back.nodes()] == labels
        round_trip &= ClassificationTree.loads(back.dumps()).dumps() == s.tree.dumps()
        trips += 1
    ok = same and round_trip
    detail = (
        f".dat outputs {'byte-identical' if same else 'DIFFER'} across serial and parallel re-runs; "
        f"{trips} tree save/load round trips {'exact' if round_trip else 'BROKEN'}"
    )
    assert report(6, "determinism and file round trips", ok, detail)
