"""Random and exhaustive automaton corpora for law testing."""

from __future__ import annotations

import random
from itertools import product
from typing import Iterator, Optional

from .core import AcceptingDfa, Alphabet, Dfa, PointedDfa, reachable_part
from .lasso import LassoAutomaton

LETTERS = "abcdefgh"


def alphabet_of_size(k: int) -> Alphabet:
    return Alphabet(tuple(LETTERS[:k]))


def random_dfa(rng: random.Random, n: int, alphabet: Alphabet) -> Dfa:
    k = len(alphabet)
    return Dfa(n, alphabet, tuple(tuple(rng.randrange(n) for _ in range(k)) for _ in range(n)))


def random_accepting(rng: random.Random, max_states: int = 6, max_letters: int = 3,
                     reachable: bool = True) -> AcceptingDfa:
    """Random pointed accepting DFA; with ``reachable`` the reachable part is
    returned (so the state count may drop below the draw)."""
    n = rng.randint(1, max_states)
    alphabet = alphabet_of_size(rng.randint(1, max_letters))
    d = random_dfa(rng, n, alphabet)
    acc = frozenset(s for s in range(n) if rng.random() < 0.5)
    a = AcceptingDfa(d, acc, 0)
    if not reachable:
        return a
    p, mapping = reachable_part(a.pointed())
    return AcceptingDfa(p.dfa, frozenset(mapping[s] for s in acc if s in mapping), 0)


def all_dfas(n: int, alphabet: Alphabet) -> Iterator[Dfa]:
    k = len(alphabet)
    for flat in product(range(n), repeat=n * k):
        yield Dfa(n, alphabet, tuple(tuple(flat[s * k:(s + 1) * k]) for s in range(n)))


def all_accepting_dfas(max_states: int, alphabet: Alphabet, reachable_only: bool = True) -> Iterator[AcceptingDfa]:
    """Every DFA up to ``max_states`` with every accepting set, pointed at 0;
    optionally only those where every state is reachable from 0."""
    for n in range(1, max_states + 1):
        for d in all_dfas(n, alphabet):
            if reachable_only and reachable_part(PointedDfa(d, 0))[0].dfa.state_count != n:
                continue
            for mask in range(1 << n):
                yield AcceptingDfa(d, frozenset(s for s in range(n) if mask >> s & 1), 0)


def random_lasso(rng: random.Random, max_sort: int = 3, alphabet: Optional[Alphabet] = None,
                 max_letters: int = 2) -> LassoAutomaton:
    if alphabet is None:
        alphabet = alphabet_of_size(rng.randint(1, max_letters))
    k = len(alphabet)
    n1, n2 = rng.randint(1, max_sort), rng.randint(1, max_sort)
    return LassoAutomaton(
        alphabet, n1, n2,
        tuple(tuple(rng.randrange(n1) for _ in range(k)) for _ in range(n1)),
        tuple(tuple(rng.randrange(n2) for _ in range(k)) for _ in range(n1)),
        tuple(tuple(rng.randrange(n2) for _ in range(k)) for _ in range(n2)),
        0,
        frozenset(y for y in range(n2) if rng.random() < 0.5),
    )


def all_lasso_automata(n1: int, n2: int, alphabet: Alphabet) -> Iterator[LassoAutomaton]:
    """Every lasso automaton with the given sort sizes and every accepting set."""
    k = len(alphabet)
    for f1 in product(range(n1), repeat=n1 * k):
        for f2 in product(range(n2), repeat=n1 * k):
            for f3 in product(range(n2), repeat=n2 * k):
                d1 = tuple(tuple(f1[x * k:(x + 1) * k]) for x in range(n1))
                d2 = tuple(tuple(f2[x * k:(x + 1) * k]) for x in range(n1))
                d3 = tuple(tuple(f3[y * k:(y + 1) * k]) for y in range(n2))
                for mask in range(1 << n2):
                    yield LassoAutomaton(
                        alphabet, n1, n2, d1, d2, d3, 0,
                        frozenset(y for y in range(n2) if mask >> y & 1),
                    )
