"""Membership and equivalence oracles with exact query accounting."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .automata import Dfa, RngLike, as_rng, exact_counterexample
from .errors import InputError


class QueryCounter:
    """Monotone count of answered membership queries."""

    __slots__ = ("count",)

    def __init__(self, count: int = 0):
        self.count = count

    def advance_to(self, count: int) -> None:
        """Move the counter forward without answering queries (idle time)."""
        if count < self.count:
            raise InputError(f"counter is monotone: cannot go from {self.count} to {count}")
        self.count = count

    def __repr__(self):
        return f"QueryCounter({self.count})"


class EvolvingTarget:
    """A stream of targets that switches once given query counts are reached.

    With ``switch_points = [s]`` the first ``s`` queries are answered by
    ``targets[0]`` and every later query by ``targets[1]``.
    """

    def __init__(self, targets: Sequence[Dfa], switch_points: Sequence[int]):
        targets = list(targets)
        switch_points = [int(s) for s in switch_points]
        if not targets:
            raise InputError("an evolving target needs at least one automaton")
        if len(switch_points) != len(targets) - 1:
            raise InputError("need exactly one switch point between consecutive targets")
        if any(b <= a for a, b in zip(switch_points, switch_points[1:])):
            raise InputError("switch points must be strictly increasing")
        if len({t.alphabet for t in targets}) != 1:
            raise InputError("all targets must share one alphabet")
        self.targets = targets
        self.switch_points = switch_points

    @property
    def alphabet(self) -> str:
        return self.targets[0].alphabet

    def index_at(self, answered: int) -> int:
        """Index of the target answering the query issued after ``answered`` others."""
        return bisect.bisect_right(self.switch_points, answered)

    def target_at(self, answered: int) -> Dfa:
        return self.targets[self.index_at(answered)]


class CountingOracle:
    """Membership oracle backed by a DFA or an :class:`EvolvingTarget`.

    Every call answers one query and bumps :attr:`counter`. Pass
    ``record=True`` to keep the target index used for each query in
    :attr:`log`.
    """

    def __init__(
        self,
        target: Union[Dfa, EvolvingTarget],
        counter: Optional[QueryCounter] = None,
        record: bool = False,
    ):
        self.target = target if isinstance(target, EvolvingTarget) else EvolvingTarget([target], [])
        self.counter = counter if counter is not None else QueryCounter()
        self.log = [] if record else None

    @property
    def alphabet(self) -> str:
        return self.target.alphabet

    @property
    def current_target(self) -> Dfa:
        """The automaton that will answer the next query."""
        return self.target.target_at(self.counter.count)

    def __call__(self, word: str) -> bool:
        idx = self.target.index_at(self.counter.count)
        answer = self.target.targets[idx].accepts(word)
        if self.log is not None:
            self.log.append(idx)
        self.counter.count += 1
        return answer


@dataclass(frozen=True)
class EqConfig:
    """Random word search: word lengths are geometric on {0, 1, ...} with the
    given mean, symbols uniform."""

    max_attempts: int = 2000
    expected_length: float = 10.0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.max_attempts < 1:
            raise InputError("max_attempts must be at least 1")
        if not self.expected_length > 0:
            raise InputError("expected_length must be positive")


def random_words(alphabet: str, mean_length: float, rng: np.random.Generator, count: int):
    """Draw ``count`` random words (a list of strings)."""
    lengths = rng.geometric(1.0 / (mean_length + 1.0), size=count) - 1
    symbols = rng.integers(len(alphabet), size=int(lengths.sum()))
    text = "".join(alphabet[i] for i in symbols)
    ends = np.cumsum(lengths)
    starts = ends - lengths
    return [text[s:e] for s, e in zip(starts.tolist(), ends.tolist())]


_BATCH = 64


def eq_random(hyp: Dfa, mq, cfg: EqConfig = EqConfig(), rng: RngLike = None) -> Optional[str]:
    """Search random words for one the hypothesis gets wrong.

    Each tested word costs exactly one membership query. Returns the first
    disagreement, or ``None`` after ``cfg.max_attempts`` agreeing words.
    """
    rng = as_rng(cfg.seed if rng is None else rng)
    left = cfg.max_attempts
    while left > 0:
        batch = random_words(hyp.alphabet, cfg.expected_length, rng, min(_BATCH, left))
        for word in batch:
            if hyp.accepts(word) != mq(word):
                return word
        left -= len(batch)
    return None


class RandomWordEquivalence:
    """Stateful :func:`eq_random`: successive calls continue one random stream."""

    def __init__(self, mq, cfg: EqConfig = EqConfig(), rng: RngLike = None):
        self.mq = mq
        self.cfg = cfg
        self.rng = as_rng(cfg.seed if rng is None else rng)
        self.calls = 0

    def __call__(self, hyp: Dfa) -> Optional[str]:
        self.calls += 1
        return eq_random(hyp, self.mq, self.cfg, self.rng)


def eq_exact(hyp: Dfa, target: Dfa) -> Optional[str]:
    """Perfect equivalence check; issues no membership queries."""
    return exact_counterexample(hyp, target)


class ExactEquivalence:
    """Callable perfect equivalence oracle against a fixed target."""

    def __init__(self, target: Dfa):
        self.target = target
        self.calls = 0

    def __call__(self, hyp: Dfa) -> Optional[str]:
        self.calls += 1
        return exact_counterexample(hyp, self.target)
