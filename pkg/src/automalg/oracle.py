"""Brute-force reference computations.

Nothing here calls the closure-based constructions it is used to check; runs
are re-implemented from the raw transition tables and every quantity is
obtained by enumerating bounded words or lassos.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Optional


@dataclass(frozen=True)
class BoundConfig:
    max_word_len: int = 8
    max_spoke: int = 4
    max_loop: int = 4
    max_subset_classes: int = 20

    def __post_init__(self):
        if min(self.max_word_len, self.max_spoke, self.max_subset_classes) < 0:
            raise ValueError("bounds must be nonnegative")
        if self.max_loop < 1:
            raise ValueError("max_loop must be at least 1")


def all_words(k: int, maxlen: int) -> list:
    out = []
    for n in range(maxlen + 1):
        out.extend(product(range(k), repeat=n))
    return out


def all_lassos(k: int, max_spoke: int, max_loop: int) -> list:
    """``(spoke, loop)`` pairs as plain tuples, loops nonempty."""
    return [(u, v) for u in all_words(k, max_spoke) for v in all_words(k, max_loop) if v]


def _trace(delta, s, w):
    for a in w:
        s = delta[s][a]
    return s


def state_function(delta, w) -> tuple:
    return tuple(_trace(delta, s, w) for s in range(len(delta)))


def brute_congruence(delta, k: int, bound: int) -> list:
    """All pairs ``(u, v)`` of words up to ``bound`` acting identically on
    every state of the table ``delta``."""
    ws = all_words(k, bound)
    fn = {w: state_function(delta, w) for w in ws}
    return [(u, v) for u in ws for v in ws if fn[u] == fn[v]]


def word_classes(delta, k: int, bound: int) -> dict:
    """Words up to ``bound`` grouped by the function they induce."""
    groups: dict = {}
    for w in all_words(k, bound):
        groups.setdefault(state_function(delta, w), []).append(w)
    return groups


def lasso_run(delta1, delta2, delta3, x, spoke, loop):
    x = _trace(delta1, x, spoke)
    y = delta2[x][loop[0]]
    return _trace(delta3, y, loop[1:])


def lasso_behaviour(delta1, delta2, delta3, spoke, loop) -> tuple:
    return tuple(lasso_run(delta1, delta2, delta3, x, spoke, loop) for x in range(len(delta1)))


def lasso_classes(delta1, delta2, delta3, k: int, max_spoke: int, max_loop: int) -> dict:
    groups: dict = {}
    for u, v in all_lassos(k, max_spoke, max_loop):
        groups.setdefault(lasso_behaviour(delta1, delta2, delta3, u, v), []).append((u, v))
    return groups


def naive_infinite_prefix(spoke, loop, n: int) -> tuple:
    w = list(spoke)
    while len(w) < n:
        w.extend(loop)
    return tuple(w[:n])


def naive_gamma(l1, l2, length: int) -> bool:
    return naive_infinite_prefix(*l1, length) == naive_infinite_prefix(*l2, length)


def brute_gamma_pairs(k: int, max_spoke: int, max_loop: int) -> list:
    """Unordered pairs of distinct bounded lassos spelling the same infinite
    word, compared letter by letter on a prefix four times longer than the
    longest lasso in range times the loop bound."""
    length = 4 * (max_spoke + max_loop * max_loop)
    ls = all_lassos(k, max_spoke, max_loop)
    keyed: dict = {}
    for l in ls:
        keyed.setdefault(naive_infinite_prefix(*l, length), []).append(l)
    out = []
    for group in keyed.values():
        for i, l in enumerate(group):
            for m in group[i + 1:]:
                out.append((l, m))
    return out


def brute_gamma_closure(delta1, delta2, delta3, pairs) -> tuple:
    """Equivalence on X2 generated by ``(run(x, l), run(x, l'))`` for the
    given γ-equivalent pairs and every X1 state; returned as class labels
    (least member of each class)."""
    n2 = len(delta3)
    parent = list(range(n2))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    memo: dict = {}

    def beh(l):
        if l not in memo:
            memo[l] = lasso_behaviour(delta1, delta2, delta3, *l)
        return memo[l]

    for l, m in pairs:
        for p, q in zip(beh(l), beh(m)):
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[max(rp, rq)] = min(rp, rq)
    return tuple(find(i) for i in range(n2))


def languages_equal_upto(
    member1: Callable, member2: Callable, candidates: Iterable
) -> tuple:
    """``(True, None)`` if both predicates agree on every candidate (scanned
    in the given order), else ``(False, first disagreement)``."""
    for c in candidates:
        if bool(member1(c)) != bool(member2(c)):
            return False, c
    return True, None


def first_difference(member1: Callable, member2: Callable, candidates: Iterable) -> Optional[object]:
    return languages_equal_upto(member1, member2, candidates)[1]


def bounded_partition(items, signature: Callable) -> list:
    """Group ``items`` by ``signature``; groups in order of first member."""
    groups: dict = {}
    for it in items:
        groups.setdefault(signature(it), []).append(it)
    return list(groups.values())
