# Learning a small regular language from queries alone.
#
# The learner never sees the automaton; it asks whether words are members
# and whether a hypothesis is right. Here the "system" is the language of
# words over {a, b} that contain "aa".
from kvadapt import ClassificationTree, CountingOracle, Dfa, classic_kv, exact_counterexample
from kvadapt.oracles import ExactEquivalence

target = Dfa("ab", [[1, 0], [2, 0], [2, 2]], 0, [False, False, True])
mq = CountingOracle(target)

# print each hypothesis as it is produced
def show(hyp, event):
    print(f"round {event.round}: {hyp.n_states} states after {event.queries} membership queries")

hyp = classic_kv("ab", mq, ExactEquivalence(target), on_hypothesis=show)

print("learned:", hyp)
print("transitions:\n", hyp.delta)
print("any disagreement left?", exact_counterexample(hyp, target))

# the same answers, one word at a time
for w in ["", "a", "aa", "bab", "baab"]:
    print(f"{w!r:8} in L: {hyp.accepts(w)}")

# a classification tree can be built and sifted by hand too
tree = ClassificationTree.node("", ClassificationTree.leaf(""), ClassificationTree.leaf("aa"))
print(tree.dumps(), end="")
