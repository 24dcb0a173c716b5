import numpy as np
import pytest
from hypothesis import strategies as st

from kvadapt.automata import Dfa


def ends_in_a() -> Dfa:
    # states {0, 1}; a -> 1, b -> 0; accept in 1
    return Dfa("ab", [[1, 0], [1, 0]], 0, [False, True])


def contains_aa() -> Dfa:
    return Dfa("ab", [[1, 0], [2, 0], [2, 2]], 0, [False, False, True])


def nonempty() -> Dfa:
    return Dfa("ab", [[1, 1], [1, 1]], 0, [False, True])


@pytest.fixture
def end_a():
    return ends_in_a()


@st.composite
def dfas(draw, max_states=6, alphabets=("ab", "abc")):
    """Arbitrary (not necessarily minimal or connected) DFAs."""
    alphabet = draw(st.sampled_from(alphabets))
    n = draw(st.integers(1, max_states))
    k = len(alphabet)
    delta = draw(st.lists(st.integers(0, n - 1), min_size=n * k, max_size=n * k))
    acc = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    q0 = draw(st.integers(0, n - 1))
    return Dfa(alphabet, np.array(delta).reshape(n, k), q0, acc)


@st.composite
def dfa_pairs(draw, max_states=6):
    alphabet = draw(st.sampled_from(("ab", "abc")))
    return draw(dfas(max_states, (alphabet,))), draw(dfas(max_states, (alphabet,)))


# acceptance criteria report: one line per criterion, printed at the end
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
