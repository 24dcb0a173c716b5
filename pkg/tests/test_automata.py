import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import contains_aa, dfa_pairs, dfas, nonempty
from kvadapt.automata import (
    Dfa,
    accepts,
    apply_feature_add,
    apply_mutation_scenario,
    canonical,
    complement,
    dumps_dfa,
    equivalent,
    exact_counterexample,
    isomorphic,
    loads_dfa,
    minimize,
    mutate_add_state,
    mutate_divert_transition,
    mutate_flip_acceptance,
    mutate_remove_state,
    random_dfa,
    reach,
    reachable_states,
    trivial_bottom,
    trivial_top,
)
from kvadapt.errors import GenerationError, InputError, ParseError


def words_upto(alphabet, n):
    for length in range(n + 1):
        for w in itertools.product(alphabet, repeat=length):
            yield "".join(w)


class TestSemantics:
    def test_reach_empty_word_is_initial(self):
        d = Dfa("ab", [[1, 0], [0, 1]], 1, [True, False])
        assert reach(d, "") == 1

    def test_reach_ends_in_a(self, end_a):
        assert reach(end_a, "aba") == 1
        assert reach(end_a, "ab") == 0

    def test_accepts(self, end_a):
        assert accepts(end_a, "aba")
        assert not accepts(end_a, "ab")
        assert not accepts(end_a, "")

    def test_unknown_symbol(self, end_a):
        with pytest.raises(InputError):
            reach(end_a, "abc")

    def test_trivial(self):
        assert not accepts(trivial_bottom("ab"), "")
        assert accepts(trivial_top("ab"), "ab")
        assert trivial_top("ab").n_states == 1
        with pytest.raises(InputError):
            trivial_top("")

    @given(st.text("ab", max_size=12))
    def test_trivial_languages(self, w):
        assert accepts(trivial_top("ab"), w)
        assert not accepts(trivial_bottom("ab"), w)

    @pytest.mark.parametrize(
        "delta, q0, acc",
        [
            ([[0, 2]], 0, [True]),          # target out of range
            ([[0]], 0, [True]),             # wrong width
            ([[0, 0]], 1, [True]),          # bad initial
            ([[0, 0]], 0, [True, False]),   # mask length
        ],
    )
    def test_invalid_tables(self, delta, q0, acc):
        with pytest.raises(InputError):
            Dfa("ab", delta, q0, acc)

    def test_repeated_alphabet(self):
        with pytest.raises(InputError):
            Dfa("aa", [[0, 0]], 0, [True])

    def test_immutable(self, end_a):
        with pytest.raises(ValueError):
            end_a.delta[0, 0] = 0

    def test_complement(self, end_a):
        c = complement(end_a)
        for w in words_upto("ab", 5):
            assert accepts(c, w) != accepts(end_a, w)


class TestMinimize:
    def test_duplicated_top(self):
        d = Dfa("ab", [[1, 1], [0, 0]], 0, [True, True])
        assert minimize(d).n_states == 1

    def test_ends_in_a_is_minimal(self, end_a):
        m = minimize(end_a)
        assert m.n_states == 2
        assert isomorphic(m, end_a)

    def test_unreachable_states_dropped(self):
        d = Dfa("ab", [[0, 0], [0, 1]], 0, [False, True])
        assert minimize(d).n_states == 1

    def test_canonical_numbering(self):
        # same automaton with states renamed
        d = Dfa("ab", [[0, 1], [0, 1]], 1, [True, False])
        assert canonical(d) == canonical(complement(complement(d)))
        assert canonical(d).initial == 0

    @given(dfas())
    @settings(max_examples=150)
    def test_preserves_language(self, d):
        m = minimize(d)
        assert exact_counterexample(d, m) is None
        assert m.n_states <= len(reachable_states(d))
        assert minimize(m) == m

    @given(dfas())
    @settings(max_examples=80)
    def test_minimal_states_pairwise_distinct(self, d):
        m = minimize(d)
        for p, q in itertools.combinations(range(m.n_states), 2):
            a = Dfa(m.alphabet, m.delta, p, m.accepting)
            b = Dfa(m.alphabet, m.delta, q, m.accepting)
            assert exact_counterexample(a, b) is not None


class TestCounterexample:
    def test_examples(self, end_a):
        top, bot = trivial_top("ab"), trivial_bottom("ab")
        assert exact_counterexample(top, top) is None
        assert exact_counterexample(top, bot) == ""
        assert exact_counterexample(top, end_a) == ""
        assert exact_counterexample(nonempty(), top) == ""
        assert exact_counterexample(end_a, contains_aa()) == "a"

    def test_alphabet_mismatch(self):
        with pytest.raises(InputError):
            exact_counterexample(trivial_top("ab"), trivial_top("abc"))

    @given(dfa_pairs(max_states=4))
    @settings(max_examples=150)
    def test_shortest_by_enumeration(self, pair):
        d1, d2 = pair
        w = exact_counterexample(d1, d2)
        # the first disagreement in length-then-alphabet order
        limit = 7 if w is None else len(w)
        first = next(
            (u for u in words_upto(d1.alphabet, limit) if accepts(d1, u) != accepts(d2, u)), None
        )
        assert w == first
        assert equivalent(d1, d2) == (w is None)


class TestRandomDfa:
    def test_one_state(self):
        d = random_dfa(1, "ab", 7)
        assert d.n_states == 1
        assert isomorphic(d, trivial_top("ab")) or isomorphic(d, trivial_bottom("ab"))

    def test_deterministic(self):
        assert random_dfa(10, "ab", 42) == random_dfa(10, "ab", 42)

    @pytest.mark.parametrize("n, alphabet", [(2, "ab"), (10, "ab"), (25, "abc"), (80, "ab")])
    def test_exact_minimal_size(self, n, alphabet):
        d = random_dfa(n, alphabet, n)
        assert d.n_states == n
        assert minimize(d) == d

    def test_frozen_draw(self):
        d = random_dfa(3, "ab", 0)
        assert dumps_dfa(d) == dumps_dfa(random_dfa(3, "ab", 0))
        assert d.n_states == 3

    def test_generation_limit(self):
        # over a one-letter alphabet every n-state candidate with a random
        # acceptance pattern is a cycle or lasso; with no retries left it fails
        with pytest.raises(GenerationError):
            random_dfa(30, "a", 1, max_retries=1)

    def test_bad_size(self):
        with pytest.raises(InputError):
            random_dfa(0, "ab", 0)


class TestMutations:
    def test_flip_top(self):
        d = mutate_flip_acceptance(trivial_top("ab"), 3)
        assert equivalent(d, trivial_bottom("ab"))

    def test_remove_one_state(self):
        with pytest.raises(InputError):
            mutate_remove_state(trivial_top("ab"), 0)

    @pytest.mark.parametrize("seed", range(20))
    def test_shapes(self, seed):
        d = random_dfa(8, "ab", seed)
        rng = np.random.default_rng(seed)
        added = mutate_add_state(d, rng)
        assert added.n_states == 9
        assert 8 in reachable_states(added)
        assert mutate_remove_state(d, rng).n_states == 7
        div = mutate_divert_transition(d, rng)
        assert div.n_states == 8
        assert int((div.delta != d.delta).sum()) == 1
        flip = mutate_flip_acceptance(d, rng)
        assert int((flip.accepting != d.accepting).sum()) == 1

    def test_remove_then_minimize_never_grows(self):
        for seed in range(100):
            d = random_dfa(10, "ab", seed)
            assert minimize(mutate_remove_state(d, seed)).n_states <= 10

    def test_scenario_keeps_raw_size(self):
        d = random_dfa(12, "ab", 5)
        assert apply_mutation_scenario(d, 5).n_states == 12

    def test_scenario_deterministic(self):
        d = random_dfa(12, "ab", 5)
        assert apply_mutation_scenario(d, 9) == apply_mutation_scenario(d, 9)

    def test_scenario_changes_language(self):
        changed = sum(
            not equivalent(d, apply_mutation_scenario(d, seed))
            for seed in range(100)
            for d in [random_dfa(20, "ab", seed)]
        )
        assert changed >= 90

    def test_scenario_needs_two_states(self):
        with pytest.raises(InputError):
            apply_mutation_scenario(trivial_top("ab"), 0)


class TestFeatureAdd:
    @pytest.mark.parametrize("seed", range(20))
    def test_construction(self, seed):
        d = random_dfa(6, "ab", seed)
        f = apply_feature_add(d, seed)
        assert f.n_states == 9
        # feature transitions stay inside the feature
        assert f.delta[6:].min() >= 6
        diverted = np.argwhere(f.delta[:6] != d.delta)
        assert len(diverted) <= 3
        assert all(f.delta[q, a] == 6 for q, a in diverted)
        assert 6 in reachable_states(f)

    def test_three_distinct_slots(self):
        # base whose transitions never point at the new index, so all three show
        d = Dfa("ab", [[0, 1], [1, 0]], 0, [True, False])
        f = apply_feature_add(d, 0)
        assert int((f.delta[:2] == 2).sum()) == 3

    def test_too_small(self):
        with pytest.raises(InputError):
            apply_feature_add(trivial_top("a"), 0)


class TestTextFormat:
    def test_frozen_text(self, end_a):
        assert dumps_dfa(end_a) == (
            "alphabet: ab\nstates: 2\ninitial: 0\naccepting: 1\ntrans 0: 1 0\ntrans 1: 1 0\n"
        )

    @given(dfas())
    def test_round_trip(self, d):
        assert loads_dfa(dumps_dfa(d)) == d

    @pytest.mark.parametrize(
        "text, line",
        [
            ("states: 1\n", 1),
            ("alphabet: ab\nstates: x\n", 2),
            ("alphabet: ab\nstates: 1\ninitial: 0\naccepting: 0\ntrans 0: 0\n", 5),
            ("alphabet: ab\nstates: 1\ninitial: 0\naccepting: 3\ntrans 0: 0 0\n", 4),
        ],
    )
    def test_parse_errors(self, text, line):
        with pytest.raises(ParseError) as err:
            loads_dfa(text)
        assert err.value.line == line
