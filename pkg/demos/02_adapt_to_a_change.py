# Reusing what was learned when the system changes.
#
# A 30-state target is learned once. Then it is mutated (a state added, one
# removed, a transition diverted, an acceptance flipped) and learned again,
# once from scratch and once starting from the old classification tree.
import numpy as np

from kvadapt import (
    CountingOracle,
    EqConfig,
    apply_mutation_scenario,
    classic_kv,
    exact_counterexample,
    incremental_kv,
    minimize,
    minimize_tree,
    random_dfa,
)
from kvadapt.oracles import RandomWordEquivalence

rng = np.random.default_rng(2024)
t0 = random_dfa(30, "ab", rng)
t1 = apply_mutation_scenario(t0, rng)
print("t0:", t0.n_states, "states; t1 (minimal):", minimize(t1).n_states, "states")

mq0 = CountingOracle(t0)
_, tree = incremental_kv("ab", None, mq0, RandomWordEquivalence(mq0, EqConfig(), 1))
print("first session:", mq0.counter.count, "queries,", tree.n_leaves(), "leaves")

# how much of the old tree still holds for the new target?
pruned = minimize_tree(tree, t1.accepts)
print("leaves surviving the change:", pruned.n_leaves(), "of", tree.n_leaves())

scratch = CountingOracle(t1)
h_scratch = classic_kv("ab", scratch, RandomWordEquivalence(scratch, EqConfig(), 2))

reuse = CountingOracle(t1)
h_reuse, _ = incremental_kv("ab", tree, reuse, RandomWordEquivalence(reuse, EqConfig(), 2))

print("from scratch:", scratch.counter.count, "queries, correct:", exact_counterexample(h_scratch, t1) is None)
print("from old tree:", reuse.counter.count, "queries, correct:", exact_counterexample(h_reuse, t1) is None)

# one pair is noisy: the eq search still has to confirm the final
# hypothesis with 2000 random words either way. The benchmark averages many
# pairs to see the saving.
