"""Kearns-Vazirani learning, classic and incremental.

Both learners talk to the system only through a membership oracle ``mq``
(word -> bool) and an equivalence oracle ``eq`` (hypothesis -> counterexample
word or ``None``). Within one learner invocation membership answers are
cached, so repeated sifts of the same word cost nothing; the target must
therefore stay fixed for the duration of a call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .automata import Dfa, trivial_bottom, trivial_top
from .ctree import ClassificationTree, minimize_tree, sift
from .errors import LearnerInvariantError

EquivalenceOracle = Callable[[Dfa], Optional[str]]


@dataclass(frozen=True)
class RoundEvent:
    """One hypothesis emission.

    ``queries`` is the oracle's cumulative membership count when the
    hypothesis was produced (the learner's own forwarded count if the
    oracle has no counter).
    """

    round: int
    queries: int
    leaves: int
    hypothesis_size: int


class CachedMembership:
    """Memoizing wrapper; :attr:`issued` counts calls that reached ``mq``."""

    def __init__(self, mq):
        self.mq = mq
        self.answers = {}
        self.issued = 0

    def __call__(self, word: str) -> bool:
        try:
            return self.answers[word]
        except KeyError:
            self.issued += 1
            ans = self.answers[word] = bool(self.mq(word))
            return ans


def build_hypothesis(tree: ClassificationTree, mq, alphabet: str) -> Dfa:
    """Hypothesis DFA whose state ``i`` is ``tree.leaves()[i]``.

    A leaf is accepting when its access sequence is a member. With an
    empty-word classifier at the root this is exactly the set of leaves
    below the root's hi-child.
    """
    leaves = tree.leaves()
    index = {leaf: i for i, leaf in enumerate(leaves)}
    delta = np.empty((len(leaves), len(alphabet)), dtype=np.int64)
    accepting = np.empty(len(leaves), dtype=bool)
    for i, leaf in enumerate(leaves):
        s = tree.label(leaf)
        accepting[i] = mq(s)
        for j, a in enumerate(alphabet):
            delta[i, j] = index[sift(tree, mq, s + a)]
    return Dfa(alphabet, delta, index[sift(tree, mq, "")], accepting)


def update_tree(tree: ClassificationTree, mq, hyp: Dfa, cex: str) -> ClassificationTree:
    """Split one leaf using a counterexample to ``hyp`` (built from ``tree``).

    Finds the shortest prefix ``cex[:i]`` whose sifted leaf differs from the
    state the hypothesis reaches, then splits the leaf of ``cex[:i-1]`` with
    classifier ``cex[i-1] + label(lca)``. When no prefix diverges (possible
    only if the root classifier is not the empty word), the reached leaf is
    split by the empty classifier instead.
    """
    leaves = tree.leaves()
    prev = sift(tree, mq, "")
    if leaves[hyp.initial] != prev:
        raise LearnerInvariantError("hypothesis was not built from this tree")
    q = hyp.initial
    for i in range(1, len(cex) + 1):
        q = hyp.reach(cex[i - 1], start=q)
        hat = leaves[q]
        cur = sift(tree, mq, cex[:i])
        if cur != hat:
            e = cex[i - 1] + tree.label(tree.lca(cur, hat))
            u = cex[: i - 1]
            return tree.split(prev, u, e, mq(u + e))[0]
        prev = cur
    if mq(cex) != hyp.is_accepting(q):
        return tree.split(prev, cex, "", mq(cex))[0]
    raise LearnerInvariantError(f"{cex!r} is not a counterexample for the hypothesis")


class LearnerSession:
    """State of one learner invocation: tree, hypothesis and round log."""

    def __init__(self, alphabet: str, mq, eq: EquivalenceOracle, on_hypothesis=None, cache=True):
        self.alphabet = alphabet
        self.raw_mq = mq
        self.mq = CachedMembership(mq) if cache else mq
        self.eq = eq
        self.on_hypothesis = on_hypothesis
        self.tree: Optional[ClassificationTree] = None
        self.hypothesis: Optional[Dfa] = None
        self.events: list = []

    def _queries(self) -> int:
        counter = getattr(self.raw_mq, "counter", None)
        if counter is not None:
            return counter.count
        return getattr(self.mq, "issued", 0)

    def emit(self, hyp: Dfa) -> None:
        self.hypothesis = hyp
        leaves = self.tree.n_leaves() if self.tree is not None else 1
        event = RoundEvent(len(self.events), self._queries(), leaves, hyp.n_states)
        self.events.append(event)
        if self.on_hypothesis is not None:
            self.on_hypothesis(hyp, event)

    def _seed(self, init: bool, cex: str) -> ClassificationTree:
        leaf = ClassificationTree.leaf
        if init:
            return ClassificationTree.node("", leaf(cex), leaf(""))
        return ClassificationTree.node("", leaf(""), leaf(cex))

    def run(self, prev_tree: Optional[ClassificationTree] = None, incremental: bool = False) -> Dfa:
        init = self.mq("")
        trivial = trivial_top(self.alphabet) if init else trivial_bottom(self.alphabet)
        # a stale tree replaces the trivial hypothesis, so only report it
        # when nothing else will be
        quiet = incremental and prev_tree is not None
        if not quiet:
            self.emit(trivial)
        s = self.eq(trivial)
        if s is None:
            self.tree = ClassificationTree.leaf("")
            if quiet:
                self.emit(trivial)
            return trivial
        if incremental and prev_tree is not None:
            self.tree = minimize_tree(prev_tree, self.mq)
        else:
            self.tree = self._seed(init, s)
        while True:
            hyp = build_hypothesis(self.tree, self.mq, self.alphabet)
            self.emit(hyp)
            cex = self.eq(hyp)
            if cex is None:
                return hyp
            before = self.tree.n_leaves()
            self.tree = update_tree(self.tree, self.mq, hyp, cex)
            if self.tree.n_leaves() != before + 1:
                raise LearnerInvariantError("tree update did not add exactly one leaf")


def classic_kv(alphabet: str, mq, eq: EquivalenceOracle, on_hypothesis=None, cache=True) -> Dfa:
    """Learn from scratch; returns the hypothesis ``eq`` accepted."""
    return LearnerSession(alphabet, mq, eq, on_hypothesis, cache).run()


def incremental_kv(
    alphabet: str,
    prev_tree: Optional[ClassificationTree],
    mq,
    eq: EquivalenceOracle,
    on_hypothesis=None,
    cache=True,
):
    """Learn starting from ``prev_tree`` (pruned first), or from scratch.

    Returns ``(hypothesis, tree)``; pass the tree to the next call once the
    target has evolved.
    """
    session = LearnerSession(alphabet, mq, eq, on_hypothesis, cache)
    hyp = session.run(prev_tree, incremental=True)
    return hyp, session.tree
