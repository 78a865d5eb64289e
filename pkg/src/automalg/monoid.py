"""Transition monoids, machines and the Galois connection between them.

A congruence on the free monoid is stored as its right-Cayley machine
(``right_step``) together with the left action of letters on classes
(``left_step``).  The left action exists exactly when the right congruence is
two-sided, so carrying it around doubles as a certificate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    EPSILON,
    AcceptingDfa,
    AlphabetMismatch,
    Alphabet,
    ContractViolation,
    Dfa,
    PointedDfa,
    is_morphism,
    reachable_part,
    run_word,
)


class NotACongruence(ValueError):
    """The right congruence given by a Cayley table is not two-sided.

    ``word`` and ``other`` land in the same class, but prefixing both with
    ``letter`` separates them.
    """

    def __init__(self, word, other, letter):
        self.word, self.other, self.letter = word, other, letter
        super().__init__(
            f"not a two-sided congruence: {word} ~ {other} but the classes of "
            f"a{word} and a{other} differ for letter index {letter}"
        )


@dataclass(frozen=True)
class CongruenceRep:
    alphabet: Alphabet
    class_count: int
    eps_class: int
    right_step: tuple  # right_step[q][a] = [w a]
    left_step: tuple  # left_step[a][q] = [a w]
    representative: tuple  # shortlex-least word of each class
    accepted_classes: Optional[frozenset] = None

    def class_of(self, w: Sequence[int]) -> int:
        q = self.eps_class
        for a in w:
            q = self.right_step[q][a]
        return q

    def with_accepted(self, accepted) -> "CongruenceRep":
        return CongruenceRep(
            self.alphabet,
            self.class_count,
            self.eps_class,
            self.right_step,
            self.left_step,
            self.representative,
            None if accepted is None else frozenset(accepted),
        )

    def tables(self) -> tuple:
        """Everything except the accepting classes, for equality checks."""
        return (self.class_count, self.eps_class, self.right_step, self.left_step, self.representative)

    def multiply(self, p: int, q: int) -> int:
        return self.class_of(self.representative[p] + self.representative[q])

    def check(self) -> None:
        """Re-verify the structural invariants; raise AssertionError on failure."""
        k = len(self.alphabet)
        assert self.representative[self.eps_class] == EPSILON
        for q in range(self.class_count):
            assert self.class_of(self.representative[q]) == q
            for a in range(k):
                r = self.right_step[q][a]
                assert len(self.representative[r]) <= len(self.representative[q]) + 1
                for b in range(k):
                    assert self.left_step[b][r] == self.right_step[self.left_step[b][q]][a]
        for a in range(k):
            assert self.left_step[a][self.eps_class] == self.right_step[self.eps_class][a]


def function_closure(dfa: Dfa):
    """Closure of the letter actions ``x -> delta(x, a)`` under composition.

    Explores words breadth first in shortlex order, so the word recorded for
    each function is its shortlex-least representative and the list order is
    the shortlex order of those words.  Returns ``(functions, words, index)``
    with functions as tuples and ``index`` keyed by them.
    """
    arrays, words, right = _closure_arrays(dfa)
    funcs = [tuple(f.tolist()) for f in arrays]
    return funcs, words, {f: i for i, f in enumerate(funcs)}


def _closure_arrays(dfa: Dfa):
    k = len(dfa.alphabet)
    table = np.array(dfa.delta, dtype=np.int32).reshape(dfa.state_count, k)
    cols = [table[:, a] for a in range(k)]
    ident = np.arange(dfa.state_count, dtype=np.int32)
    funcs = [ident]
    words = [EPSILON]
    index = {ident.tobytes(): 0}
    right = []
    i = 0
    while i < len(funcs):
        f, w = funcs[i], words[i]
        row = []
        for a in range(k):
            g = cols[a][f]
            key = g.tobytes()
            j = index.get(key)
            if j is None:
                j = index[key] = len(funcs)
                funcs.append(g)
                words.append(w + (a,))
            row.append(j)
        right.append(tuple(row))
        i += 1
    return funcs, words, tuple(right)


def kernel_congruence(dfa: Dfa) -> CongruenceRep:
    """The congruence ``u ~ v  iff  delta(x, u) = delta(x, v)`` for every state x."""
    funcs, words, right = _closure_arrays(dfa)
    k = len(dfa.alphabet)
    index = {f.tobytes(): i for i, f in enumerate(funcs)}
    table = np.array(dfa.delta, dtype=np.int32).reshape(dfa.state_count, k)
    stacked = np.stack(funcs)
    # [a w] acts as x -> f_w(delta(x, a))
    left = tuple(
        tuple(index[row.tobytes()] for row in stacked[:, table[:, a]])
        for a in range(k)
    )
    return CongruenceRep(dfa.alphabet, len(funcs), 0, right, left, tuple(words))


def transition_monoid(p: PointedDfa) -> CongruenceRep:
    """Kernel of the transition-monoid map of the reachable part of ``p``."""
    r, _ = reachable_part(p)
    return kernel_congruence(r.dfa)


def machine(c: CongruenceRep) -> PointedDfa:
    return PointedDfa(Dfa(c.class_count, c.alphabet, c.right_step), c.eps_class)


def congruence_leq(c: CongruenceRep, d: CongruenceRep) -> bool:
    """Is ``c`` contained in ``d`` (is ``[w]_c -> [w]_d`` well defined)?"""
    return refinement_witness(c, d) is None


def refinement_witness(c: CongruenceRep, d: CongruenceRep):
    """``None`` if ``c`` refines ``d``, else words ``(u, v)`` equal in ``c``
    but not in ``d``."""
    if c.alphabet != d.alphabet:
        raise AlphabetMismatch("congruences over different alphabets")
    start = (c.eps_class, d.eps_class)
    seen = {start: EPSILON}
    image = {c.eps_class: (d.eps_class, EPSILON)}
    queue = deque([start])
    k = len(c.alphabet)
    while queue:
        qc, qd = queue.popleft()
        w = seen[(qc, qd)]
        for a in range(k):
            nxt = (c.right_step[qc][a], d.right_step[qd][a])
            if nxt in seen:
                continue
            wa = w + (a,)
            seen[nxt] = wa
            prev = image.setdefault(nxt[0], (nxt[1], wa))
            if prev[0] != nxt[1]:
                return prev[1], wa
            queue.append(nxt)
    return None


def verify_congruence(
    alphabet: Alphabet,
    class_count: int,
    eps_class: int,
    right_step: Sequence[Sequence[int]],
    accepted_classes=None,
) -> CongruenceRep:
    """Validate a right-Cayley table and return the canonical CongruenceRep.

    Classes are renumbered in shortlex order of their least representatives.
    Raises ``ValueError`` for malformed or non-reachable tables and
    :class:`NotACongruence` when the right congruence is not two-sided.
    """
    k = len(alphabet)
    if class_count < 1 or not 0 <= eps_class < class_count:
        raise ValueError("bad class count or epsilon class")
    if len(right_step) != class_count or any(len(row) != k for row in right_step):
        raise ValueError("right_step must be a total class_count x |alphabet| table")
    if any(not 0 <= t < class_count for row in right_step for t in row):
        raise ValueError("right_step target out of range")

    order = [eps_class]
    new_id = {eps_class: 0}
    reps = [EPSILON]
    i = 0
    while i < len(order):
        q = order[i]
        for a in range(k):
            t = right_step[q][a]
            if t not in new_id:
                new_id[t] = len(order)
                order.append(t)
                reps.append(reps[i] + (a,))
        i += 1
    if len(order) != class_count:
        missing = sorted(set(range(class_count)) - set(order))
        raise ValueError(f"classes {missing} are not reachable from the epsilon class")

    right = tuple(tuple(new_id[right_step[q][a]] for a in range(k)) for q in order)
    n = class_count

    # left[a][q] := [a w] for w = rep(q), propagated along the BFS tree.
    left = [[None] * n for _ in range(k)]
    for a in range(k):
        left[a][0] = right[0][a]
        for q in range(n):
            for b in range(k):
                t = right[q][b]
                if left[a][t] is None and reps[t] == reps[q] + (b,):
                    left[a][t] = right[left[a][q]][b]
    for a in range(k):
        for q in range(n):
            for b in range(k):
                t = right[q][b]
                if left[a][t] != right[left[a][q]][b]:
                    raise NotACongruence(reps[q] + (b,), reps[t], a)
    acc = None
    if accepted_classes is not None:
        acc = frozenset(new_id[q] for q in accepted_classes)
    return CongruenceRep(
        alphabet, n, 0, right, tuple(tuple(r) for r in left), tuple(reps), acc
    )


def counit(p: PointedDfa) -> tuple:
    """The map ``[u] -> delta(initial, u)`` from ``machine(transition_monoid(p))``."""
    c = transition_monoid(p)
    f = tuple(run_word(p.dfa, p.initial, w) for w in c.representative)
    if not is_morphism(machine(c), p, f):
        raise AssertionError("counit failed to be a morphism")
    return f


def t_with_acceptance(a: AcceptingDfa) -> CongruenceRep:
    p = a.pointed()
    c = transition_monoid(p)
    acc = frozenset(
        q for q, w in enumerate(c.representative) if run_word(a.dfa, p.initial, w) in a.accepting
    )
    return c.with_accepted(acc)


def m_with_acceptance(c: CongruenceRep) -> AcceptingDfa:
    if c.accepted_classes is None:
        raise ContractViolation("congruence carries no accepted classes")
    m = machine(c)
    return AcceptingDfa(m.dfa, c.accepted_classes, m.initial)
