# How close is a hypothesis? Discounted agreement between two automata.
#
# Every word u gets weight (1 - alpha) * (alpha / |A|)^|u|; progress is the
# weight of the words where hypothesis and target agree. It is computed
# exactly on the product automaton, and the truncated series is a check.
import numpy as np

from kvadapt import complement, progress, progress_truncated, random_dfa, trivial_top
from kvadapt.automata import Dfa

everything = trivial_top("ab")
nonempty = Dfa("ab", [[1, 1], [1, 1]], 0, [False, True])

# they only disagree on the empty word, which weighs 1 - alpha
for alpha in (0.5, 0.9, 0.999):
    print(alpha, progress(everything, nonempty, alpha))

t, h = random_dfa(40, "ab", 1), random_dfa(40, "ab", 2)
exact = progress(t, h, 0.9)
series = progress_truncated(t, h, 0.9, tol=1e-9)
print("exact", exact, "series", series, "diff", abs(exact - series))

# h and its complement split the words between them
print("p(h) + p(not h) =", exact + progress(t, complement(h), 0.9))

# the reference fixed-point iteration, the LU solve and the Krylov solver
for method in ("iterate", "solve", "krylov"):
    print(method, progress(t, h, 0.999, method=method))

# progress along a learning run
from kvadapt import CountingOracle, classic_kv
from kvadapt.oracles import ExactEquivalence

curve = []
classic_kv("ab", CountingOracle(t), ExactEquivalence(t),
           on_hypothesis=lambda hyp, ev: curve.append((ev.queries, progress(t, hyp, 0.999))))
print(np.array(curve)[::5])
