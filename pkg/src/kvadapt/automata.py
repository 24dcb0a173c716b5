"""Complete deterministic finite automata over a small ordered alphabet.

Words are plain Python strings whose characters are alphabet symbols; the
empty string is the empty word. A :class:`Dfa` stores its transition function
as a dense ``(n_states, n_symbols)`` integer table, so state ``q`` on the
``i``-th alphabet symbol goes to ``delta[q, i]``.

Besides the semantics (``reach``/``accepts``) this module carries the exact
analyses the rest of the package relies on (minimization, shortest
counterexamples) and the random generators used by the experiments.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import GenerationError, InputError, ParseError

RngLike = Union[np.random.Generator, int, None]


def as_rng(rng: RngLike) -> np.random.Generator:
    """Return ``rng`` unchanged if it is a Generator, else seed a new PCG64 one."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _check_alphabet(alphabet: str) -> str:
    if not isinstance(alphabet, str) or not alphabet:
        raise InputError("alphabet must be a non-empty string of symbols")
    if len(set(alphabet)) != len(alphabet):
        raise InputError(f"alphabet {alphabet!r} has repeated symbols")
    if any(not ch.isprintable() or ch.isspace() for ch in alphabet):
        raise InputError(f"alphabet {alphabet!r} must use printable, non-space symbols")
    return alphabet


@dataclass(frozen=True, eq=False)
class Dfa:
    """A complete DFA ``<Q, q0, delta, F>`` with states ``0 .. n-1``.

    Instances are immutable: the arrays are copied and marked read-only on
    construction. Two automata compare equal when their tables are
    identical, which is stronger than language equivalence (use
    :func:`exact_counterexample` or :func:`isomorphic` for those).
    """

    alphabet: str
    delta: np.ndarray
    initial: int
    accepting: np.ndarray

    def __post_init__(self):
        _check_alphabet(self.alphabet)
        delta = np.array(self.delta, dtype=np.int64, copy=True)
        accepting = np.array(self.accepting, dtype=bool, copy=True)
        k = len(self.alphabet)
        if delta.ndim != 2 or delta.shape[1] != k or delta.shape[0] < 1:
            raise InputError(
                f"transition table must have shape (n >= 1, {k}), got {delta.shape}"
            )
        n = delta.shape[0]
        if delta.min() < 0 or delta.max() >= n:
            raise InputError("transition table points outside the state set")
        if accepting.shape != (n,):
            raise InputError(f"accepting mask must have shape ({n},)")
        if not 0 <= int(self.initial) < n:
            raise InputError(f"initial state {self.initial} outside 0..{n - 1}")
        delta.setflags(write=False)
        accepting.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "initial", int(self.initial))

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @cached_property
    def symbol_index(self) -> dict:
        return {ch: i for i, ch in enumerate(self.alphabet)}

    @cached_property
    def _step(self) -> list:
        # per-state dict symbol -> successor; the hot path for reach()
        return [dict(zip(self.alphabet, map(int, row))) for row in self.delta]

    @cached_property
    def _final(self) -> tuple:
        return tuple(bool(x) for x in self.accepting)

    def reach(self, word: str, start: Optional[int] = None) -> int:
        q = self.initial if start is None else start
        step = self._step
        try:
            for ch in word:
                q = step[q][ch]
        except KeyError:
            bad = sorted(set(word) - set(self.alphabet))
            raise InputError(f"symbols {bad} not in alphabet {self.alphabet!r}") from None
        return q

    def accepts(self, word: str) -> bool:
        return self._final[self.reach(word)]

    def is_accepting(self, state: int) -> bool:
        return self._final[state]

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.initial == other.initial
            and np.array_equal(self.delta, other.delta)
            and np.array_equal(self.accepting, other.accepting)
        )

    def __hash__(self):
        return hash((self.alphabet, self.initial, self.delta.tobytes(), self.accepting.tobytes()))

    def __repr__(self):
        return (
            f"Dfa(alphabet={self.alphabet!r}, n_states={self.n_states}, "
            f"initial={self.initial}, accepting={np.flatnonzero(self.accepting).tolist()})"
        )


def reach(dfa: Dfa, word: str) -> int:
    """State reached from the initial state by reading ``word``."""
    return dfa.reach(word)


def accepts(dfa: Dfa, word: str) -> bool:
    return dfa.accepts(word)


def trivial_top(alphabet: str) -> Dfa:
    """The one-state automaton accepting every word."""
    _check_alphabet(alphabet)
    return Dfa(alphabet, np.zeros((1, len(alphabet)), dtype=np.int64), 0, [True])


def trivial_bottom(alphabet: str) -> Dfa:
    """The one-state automaton accepting nothing."""
    _check_alphabet(alphabet)
    return Dfa(alphabet, np.zeros((1, len(alphabet)), dtype=np.int64), 0, [False])


def complement(dfa: Dfa) -> Dfa:
    return Dfa(dfa.alphabet, dfa.delta, dfa.initial, ~dfa.accepting)


def _bfs_order(delta: np.ndarray, initial: int) -> list:
    order = [initial]
    seen = {initial}
    i = 0
    while i < len(order):
        for t in delta[order[i]]:
            t = int(t)
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return order


def reachable_states(dfa: Dfa) -> list:
    """Reachable states in breadth-first discovery order over the alphabet."""
    return _bfs_order(dfa.delta, dfa.initial)


def canonical(dfa: Dfa) -> Dfa:
    """Drop unreachable states and renumber by breadth-first discovery order."""
    order = reachable_states(dfa)
    rename = np.full(dfa.n_states, -1, dtype=np.int64)
    rename[order] = np.arange(len(order))
    return Dfa(dfa.alphabet, rename[dfa.delta[order]], 0, dfa.accepting[order])


def minimize(dfa: Dfa) -> Dfa:
    """Minimal equivalent DFA, canonically numbered.

    Moore-style partition refinement on the reachable part: a block splits
    whenever two of its states disagree on which blocks their successors
    lie in. The quotient is renumbered with :func:`canonical`, so two
    language-equivalent inputs yield identical outputs.
    """
    d = canonical(dfa)
    delta = d.delta
    blocks = d.accepting.astype(np.int64)
    n_blocks = len(np.unique(blocks))
    while True:
        signature = np.column_stack([blocks, blocks[delta]])
        _, refined = np.unique(signature, axis=0, return_inverse=True)
        refined = refined.reshape(-1)
        n_refined = int(refined.max()) + 1
        blocks = refined
        if n_refined == n_blocks:
            break
        n_blocks = n_refined
    reps = np.zeros(n_blocks, dtype=np.int64)
    # one representative per block; any member works since blocks are congruent
    reps[blocks[::-1]] = np.arange(d.n_states)[::-1]
    quotient = Dfa(d.alphabet, blocks[delta[reps]], int(blocks[d.initial]), d.accepting[reps])
    return canonical(quotient)


def isomorphic(d1: Dfa, d2: Dfa) -> bool:
    """True when the reachable parts are identical up to state renaming."""
    return canonical(d1) == canonical(d2)


def exact_counterexample(d1: Dfa, d2: Dfa) -> Optional[str]:
    """Shortest word on which the two automata disagree, or ``None``.

    Breadth-first search over the product automaton, expanding symbols in
    alphabet order; among the shortest disagreements the lexicographically
    least (w.r.t. the alphabet order) is returned.
    """
    if d1.alphabet != d2.alphabet:
        raise InputError(f"alphabet mismatch: {d1.alphabet!r} vs {d2.alphabet!r}")
    a1, a2 = d1._final, d2._final
    t1 = d1.delta.tolist()
    t2 = d2.delta.tolist()
    start = (d1.initial, d2.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        p, q = pair
        if a1[p] != a2[q]:
            word = []
            while parent[pair] is not None:
                pair, sym = parent[pair]
                word.append(d1.alphabet[sym])
            return "".join(reversed(word))
        r1, r2 = t1[p], t2[q]
        for i in range(len(d1.alphabet)):
            nxt = (r1[i], r2[i])
            if nxt not in parent:
                parent[nxt] = (pair, i)
                queue.append(nxt)
    return None


def equivalent(d1: Dfa, d2: Dfa) -> bool:
    return exact_counterexample(d1, d2) is None


# -- random generation --------------------------------------------------------


def _random_accessible(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    delta = rng.integers(0, n, size=(n, k))
    # random spanning tree rooted at 0 keeps every state reachable
    free = [(0, a) for a in range(k)]
    for state in range(1, n):
        slot = free.pop(int(rng.integers(len(free))))
        delta[slot] = state
        free.extend((state, a) for a in range(k))
    return delta


def random_dfa(n: int, alphabet: str, rng: RngLike = None, max_retries: int = 10_000) -> Dfa:
    """A random minimal DFA with exactly ``n`` states.

    Each candidate has a random spanning tree from state 0 (so all ``n``
    states are reachable), the remaining transitions uniform over the
    states and each state accepting with probability 1/2. Candidates whose
    minimization loses states are rejected. The result is canonically
    numbered.
    """
    _check_alphabet(alphabet)
    if n < 1:
        raise InputError("a DFA needs at least one state")
    rng = as_rng(rng)
    k = len(alphabet)
    for _ in range(max_retries):
        delta = _random_accessible(n, k, rng)
        accepting = rng.random(n) < 0.5
        candidate = minimize(Dfa(alphabet, delta, 0, accepting))
        if candidate.n_states == n:
            return candidate
    raise GenerationError(
        f"no minimal {n}-state DFA over {alphabet!r} after {max_retries} attempts"
    )


def mutate_add_state(dfa: Dfa, rng: RngLike = None) -> Dfa:
    """Add one state with random successors and acceptance, and divert one
    existing transition into it."""
    rng = as_rng(rng)
    n, k = dfa.delta.shape
    new_row = rng.integers(0, n + 1, size=(1, k))
    new_acc = bool(rng.random() < 0.5)
    delta = np.vstack([dfa.delta, new_row])
    slot = int(rng.integers(n * k))
    delta[slot // k, slot % k] = n
    return Dfa(dfa.alphabet, delta, dfa.initial, np.append(dfa.accepting, new_acc))


def mutate_remove_state(dfa: Dfa, rng: RngLike = None) -> Dfa:
    """Delete a random non-initial state; each transition into it is
    re-targeted independently and uniformly over the remaining states."""
    rng = as_rng(rng)
    n, k = dfa.delta.shape
    if n < 2:
        raise InputError("cannot remove a state from a one-state DFA")
    candidates = [q for q in range(n) if q != dfa.initial]
    victim = candidates[int(rng.integers(len(candidates)))]
    keep = np.array([q for q in range(n) if q != victim])
    rename = np.full(n, -1, dtype=np.int64)
    rename[keep] = np.arange(n - 1)
    delta = dfa.delta[keep].copy()
    hits = delta == victim
    delta = rename[np.where(hits, 0, delta)]
    delta[hits] = rng.integers(0, n - 1, size=int(hits.sum()))
    return Dfa(dfa.alphabet, delta, int(rename[dfa.initial]), dfa.accepting[keep])


def mutate_divert_transition(dfa: Dfa, rng: RngLike = None) -> Dfa:
    """Re-target one random transition to a different random state."""
    rng = as_rng(rng)
    n, k = dfa.delta.shape
    slot = int(rng.integers(n * k))
    q, a = divmod(slot, k)
    delta = dfa.delta.copy()
    if n > 1:
        others = [t for t in range(n) if t != delta[q, a]]
        delta[q, a] = others[int(rng.integers(len(others)))]
    return Dfa(dfa.alphabet, delta, dfa.initial, dfa.accepting)


def mutate_flip_acceptance(dfa: Dfa, rng: RngLike = None) -> Dfa:
    rng = as_rng(rng)
    q = int(rng.integers(dfa.n_states))
    accepting = dfa.accepting.copy()
    accepting[q] = not accepting[q]
    return Dfa(dfa.alphabet, dfa.delta, dfa.initial, accepting)


def apply_mutation_scenario(dfa: Dfa, rng: RngLike = None) -> Dfa:
    """Add a state, remove a state, divert a transition, flip an acceptance."""
    if dfa.n_states < 2:
        raise InputError("the mutation scenario needs at least two states")
    rng = as_rng(rng)
    d = mutate_add_state(dfa, rng)
    d = mutate_remove_state(d, rng)
    d = mutate_divert_transition(d, rng)
    return mutate_flip_acceptance(d, rng)


FEATURE_SIZE = 3


def apply_feature_add(dfa: Dfa, rng: RngLike = None) -> Dfa:
    """Graft a random 3-state feature automaton onto ``dfa``.

    The feature's transitions stay inside its own three states; three
    distinct transitions of the base automaton are diverted into the
    feature's start state, which gets index ``dfa.n_states``.
    """
    rng = as_rng(rng)
    n, k = dfa.delta.shape
    if n * k < FEATURE_SIZE:
        raise InputError(f"need at least {FEATURE_SIZE} transitions to divert, have {n * k}")
    feature = n + rng.integers(0, FEATURE_SIZE, size=(FEATURE_SIZE, k))
    feature_acc = rng.random(FEATURE_SIZE) < 0.5
    delta = np.vstack([dfa.delta, feature])
    for slot in rng.choice(n * k, size=FEATURE_SIZE, replace=False):
        delta[slot // k, slot % k] = n
    return Dfa(dfa.alphabet, delta, dfa.initial, np.concatenate([dfa.accepting, feature_acc]))


# -- text format ----------------------------------------------------------------


def dumps_dfa(dfa: Dfa) -> str:
    lines = [
        f"alphabet: {dfa.alphabet}",
        f"states: {dfa.n_states}",
        f"initial: {dfa.initial}",
        "accepting: " + " ".join(str(q) for q in np.flatnonzero(dfa.accepting)),
    ]
    for q, row in enumerate(dfa.delta):
        lines.append(f"trans {q}: " + " ".join(str(int(t)) for t in row))
    return "\n".join(lines) + "\n"


def _header(lines, idx, key):
    if idx >= len(lines):
        raise ParseError(f"missing '{key}:' line", idx + 1, 1)
    head, sep, rest = lines[idx].partition(":")
    if not sep or head.strip() != key:
        raise ParseError(f"expected '{key}:'", idx + 1, 1)
    return rest.strip()


def _ints(text, line_no):
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(f"expected integers, got {text!r}", line_no, 1) from None


def loads_dfa(text: str) -> Dfa:
    """Parse the line-oriented DFA format written by :func:`dumps_dfa`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    alphabet = _header(lines, 0, "alphabet")
    n_text = _header(lines, 1, "states")
    n = _ints(n_text, 2)
    if len(n) != 1 or n[0] < 1:
        raise ParseError(f"bad state count {n_text!r}", 2, 1)
    n = n[0]
    initial = _ints(_header(lines, 2, "initial"), 3)
    if len(initial) != 1:
        raise ParseError("expected one initial state", 3, 1)
    acc_ids = _ints(_header(lines, 3, "accepting"), 4)
    if len(lines) != 4 + n:
        raise ParseError(f"expected {n} 'trans' lines, got {len(lines) - 4}", len(lines), 1)
    delta = []
    for q in range(n):
        line_no = 5 + q
        head, sep, rest = lines[4 + q].partition(":")
        if not sep or head.split() != ["trans", str(q)]:
            raise ParseError(f"expected 'trans {q}:'", line_no, 1)
        row = _ints(rest, line_no)
        if len(row) != len(alphabet):
            raise ParseError(f"expected {len(alphabet)} targets", line_no, len(head) + 2)
        delta.append(row)
    accepting = np.zeros(n, dtype=bool)
    for q in acc_ids:
        if not 0 <= q < n:
            raise ParseError(f"accepting state {q} out of range", 4, 1)
        accepting[q] = True
    try:
        return Dfa(alphabet, np.array(delta, dtype=np.int64), initial[0], accepting)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def save_dfa(dfa: Dfa, path) -> None:
    Path(path).write_text(dumps_dfa(dfa))


def load_dfa(path) -> Dfa:
    return loads_dfa(Path(path).read_text())
