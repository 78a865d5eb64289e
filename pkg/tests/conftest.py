import random

import pytest
from hypothesis import strategies as st

from automalg.core import AcceptingDfa, Alphabet, Dfa
from automalg.generate import random_accepting, random_lasso
from automalg.lasso import LassoAutomaton

AB = Alphabet(("a", "b"))


def two_state_example() -> AcceptingDfa:
    # x -a-> y, x -b-> x, y -a-> y, y -b-> x; pointed at x, accepting {x}
    return AcceptingDfa(Dfa(2, AB, ((1, 0), (1, 0))), frozenset({0}), 0)


def loop_starts_with_a() -> LassoAutomaton:
    return LassoAutomaton(AB, 1, 2, ((0, 0),), ((0, 1),), ((0, 0), (1, 1)), 0, frozenset({0}))


@pytest.fixture
def example():
    return two_state_example()


@pytest.fixture
def loop_a():
    return loop_starts_with_a()


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def accepting_dfas(draw, max_states=5, max_letters=2):
    return random_accepting(random.Random(draw(seeds)), max_states, max_letters)


@st.composite
def lasso_automata(draw, max_sort=3, max_letters=2):
    return random_lasso(random.Random(draw(seeds)), max_sort, max_letters=max_letters)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
