"""Largest sets of equations and smallest sets of coequations for DFAs.

``nuc`` is the comonad machine-of-transition-monoid on the reachable part;
``mupl`` is its dual, obtained by sandwiching ``nuc`` between two
contravariant powerset lifts.  States of a :class:`MuplAutomaton` are subsets
of congruence classes encoded as bitmasks (bit ``q`` set iff class ``q`` is in
the subset), so state ``U`` has index ``U``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    AcceptingDfa,
    Dfa,
    PointedDfa,
    SizeGuardError,
    bisimilarity_partition,
    run_word,
)
from .monoid import (
    CongruenceRep,
    kernel_congruence,
    machine,
    transition_monoid,
)

DEFAULT_MAX_CLASSES = 20


def nuc(p: PointedDfa, accepting=None):
    """``machine(transition_monoid(reachable_part(p)))``.

    With ``accepting`` given, returns an :class:`AcceptingDfa` whose accepting
    classes are those whose representative leads ``p`` into ``accepting``.
    """
    c = transition_monoid(p)
    m = machine(c)
    if accepting is None:
        return m
    acc = frozenset(
        q for q, w in enumerate(c.representative) if run_word(p.dfa, p.initial, w) in accepting
    )
    return AcceptingDfa(m.dfa, acc, m.initial)


def free(d: Dfa) -> PointedDfa:
    """Machine of the kernel quantified over every state, reachable or not."""
    return machine(kernel_congruence(d))


@dataclass(frozen=True)
class PowersetDfa:
    base: AcceptingDfa
    states: tuple  # frozensets of base states
    delta_hat: tuple  # delta_hat[i][a] -> index into states
    initial: int = 0

    def as_pointed(self) -> PointedDfa:
        return PointedDfa(Dfa(len(self.states), self.base.alphabet, self.delta_hat), self.initial)

    def index(self, subset) -> int:
        return self.states.index(frozenset(subset))


def inverse_image(dfa: Dfa, subset: frozenset, a: int) -> frozenset:
    return frozenset(x for x in dfa.states if dfa.delta[x][a] in subset)


def powerset_lift(a: AcceptingDfa, full: bool = False) -> PowersetDfa:
    """Contravariant powerset automaton pointed at the accepting set.

    By default only subsets reachable from the accepting set are kept.  With
    ``full=True`` every subset of the state space is a state, listed BFS-first
    from the accepting set and then by bitmask.
    """
    dfa = a.dfa
    k = len(a.alphabet)
    start = frozenset(a.accepting)
    states = [start]
    index = {start: 0}
    i = 0
    while i < len(states):
        for c in range(k):
            t = inverse_image(dfa, states[i], c)
            if t not in index:
                index[t] = len(states)
                states.append(t)
        i += 1
    if full:
        for mask in range(1 << dfa.state_count):
            s = frozenset(x for x in dfa.states if mask >> x & 1)
            if s not in index:
                index[s] = len(states)
                states.append(s)
    delta = tuple(tuple(index[inverse_image(dfa, s, c)] for c in range(k)) for s in states)
    return PowersetDfa(a, tuple(states), delta, 0)


def reverse(w: Sequence[int]) -> tuple:
    return tuple(reversed(w))


def mask_of(classes) -> int:
    m = 0
    for q in classes:
        m |= 1 << q
    return m


def members(mask: int) -> list:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


_VECTOR_THRESHOLD = 96


class SubsetAutomaton:
    """Full powerset automaton dual to a congruence's right-Cayley machine.

    The letter ``a`` sends ``U`` to ``{q | right_step(q, a) in U}``; a subset
    accepts iff it holds the epsilon class.  Transitions are evaluated on
    demand; :meth:`as_accepting` materialises all ``2**k`` states.
    """

    def __init__(self, table: CongruenceRep):
        self.table = table
        k = len(table.alphabet)
        n = table.class_count
        # pre[a][p] = mask of classes q with right_step(q, a) == p
        self._pre = [[0] * n for _ in range(k)]
        for q in range(n):
            for a in range(k):
                self._pre[a][table.right_step[q][a]] |= 1 << q
        self._cols = None
        if n > _VECTOR_THRESHOLD:
            right = np.array(table.right_step, dtype=np.intp).reshape(n, k)
            self._cols = [right[:, a].copy() for a in range(k)]
            self._nbytes = (n + 7) // 8

    @property
    def class_count(self) -> int:
        return self.table.class_count

    @property
    def state_count(self) -> int:
        return 1 << self.table.class_count

    @property
    def alphabet(self):
        return self.table.alphabet

    def step(self, mask: int, a: int) -> int:
        if self._cols is not None:
            # gather: bit q of the result is bit right_step(q, a) of mask
            raw = np.frombuffer(mask.to_bytes(self._nbytes, "little"), dtype=np.uint8)
            bits = np.unpackbits(raw, bitorder="little")
            out = np.packbits(bits[self._cols[a]], bitorder="little")
            return int.from_bytes(out.tobytes(), "little")
        pre = self._pre[a]
        out = 0
        for q in members(mask):
            out |= pre[q]
        return out

    def run(self, mask: int, w: Sequence[int]) -> int:
        for a in w:
            mask = self.step(mask, a)
        return mask

    def is_accepting(self, mask: int) -> bool:
        return bool(mask >> self.table.eps_class & 1)

    def language_member(self, mask: int, u: Sequence[int]) -> bool:
        """Membership via the class of the reversed word, no transitions used."""
        return bool(mask >> self.table.class_of(reverse(u)) & 1)

    def transition_table(self) -> tuple:
        k = len(self.table.alphabet)
        rows = [[0] * k for _ in range(self.state_count)]
        for mask in range(1, self.state_count):
            low = mask & -mask
            rest = rows[mask ^ low]
            bit = low.bit_length() - 1
            row = rows[mask]
            for a in range(k):
                row[a] = rest[a] | self._pre[a][bit]
        return tuple(tuple(r) for r in rows)

    def as_accepting(self, initial: Optional[int] = None) -> AcceptingDfa:
        acc = frozenset(m for m in range(self.state_count) if self.is_accepting(m))
        return AcceptingDfa(Dfa(self.state_count, self.alphabet, self.transition_table()), acc, initial)

    def label(self, mask: int) -> str:
        reps = [self.table.alphabet.format(self.table.representative[q]) for q in members(mask)]
        return "{" + ",".join(f"[{r}]" for r in reps) + "}"


class MuplAutomaton(SubsetAutomaton):
    """The automaton ``mupl(a)``; ``initial`` is the image of ``a.initial``
    under the unit when ``a`` has one."""

    def __init__(self, base: AcceptingDfa, lift: PowersetDfa, table: CongruenceRep, initial):
        super().__init__(table)
        self.base = base
        self.lift = lift
        self.initial = initial

    def accepting_dfa(self) -> AcceptingDfa:
        return self.as_accepting(self.initial)


def _check_size(n: int, max_classes) -> None:
    if max_classes is not None and n > max_classes:
        raise SizeGuardError(f"{n} classes exceeds the bound of {max_classes} (2^{n} subsets)")


def eta_mask(a: AcceptingDfa, table: CongruenceRep, x: int) -> int:
    """``{[w] | delta(x, reverse(w)) in accepting}`` as a bitmask."""
    return mask_of(
        q for q, w in enumerate(table.representative) if run_word(a.dfa, x, reverse(w)) in a.accepting
    )


def mupl(a: AcceptingDfa, max_classes: Optional[int] = DEFAULT_MAX_CLASSES) -> MuplAutomaton:
    lift = powerset_lift(a)
    table = transition_monoid(lift.as_pointed())
    _check_size(table.class_count, max_classes)
    init = None if a.initial is None else eta_mask(a, table, a.initial)
    return MuplAutomaton(a, lift, table, init)


def unit_eta(a: AcceptingDfa, m: Optional[MuplAutomaton] = None) -> tuple:
    """State map ``a -> mupl(a)``, checked to commute with transitions and
    preserve acceptance."""
    if m is None:
        m = mupl(a, max_classes=None)
    eta = tuple(eta_mask(a, m.table, x) for x in a.dfa.states)
    k = len(a.alphabet)
    for x in a.dfa.states:
        if (x in a.accepting) != m.is_accepting(eta[x]):
            raise AssertionError(f"unit does not preserve acceptance at state {x}")
        for c in range(k):
            if eta[a.dfa.delta[x][c]] != m.step(eta[x], c):
                raise AssertionError(f"unit does not commute with letter {c} at state {x}")
    return eta


@dataclass(frozen=True)
class CofreeAutomaton:
    """Distinct languages ``L(x, U)`` closed under derivatives.

    ``members[i]`` lists the ``(x, U)`` pairs whose language is state ``i``.
    """

    automaton: AcceptingDfa
    members: tuple

    def language_state(self, x: int, coloring) -> int:
        key = (x, frozenset(coloring))
        for i, ms in enumerate(self.members):
            if key in ms:
                return i
        raise KeyError(key)


def colorings(n: int, mode: str) -> list:
    if mode == "all":
        return [frozenset(x for x in range(n) if m >> x & 1) for m in range(1 << n)]
    if mode == "singleton":
        return [frozenset([x]) for x in range(n)]
    raise ValueError(f"unknown coloring mode {mode!r}")


def cofree(d: Dfa, mode: str = "all") -> CofreeAutomaton:
    """Languages ``L(x, U)`` for all states x and colorings U (all subsets, or
    singletons), identified up to bisimilarity.

    State order follows the first pair ``(x, U)`` reaching each language,
    enumerated by coloring first (in bitmask order), then by state.
    """
    cols = colorings(d.state_count, mode)
    n = d.state_count
    pairs = [(x, U) for U in cols for x in range(n)]
    index = {p: i for i, p in enumerate(pairs)}
    k = len(d.alphabet)
    delta = tuple(tuple(index[(d.delta[x][a], U)] for a in range(k)) for x, U in pairs)
    acc = frozenset(i for i, (x, U) in enumerate(pairs) if x in U)
    big = AcceptingDfa(Dfa(len(pairs), d.alphabet, delta), acc)
    part = bisimilarity_partition(big)
    reps = [cls[0] for cls in part.classes()]
    qdelta = tuple(tuple(part.class_of[t] for t in big.dfa.delta[r]) for r in reps)
    qacc = frozenset(part.class_of[i] for i in acc)
    mem = tuple(tuple(pairs[i] for i in cls) for cls in part.classes())
    return CofreeAutomaton(AcceptingDfa(Dfa(len(reps), d.alphabet, qdelta), qacc), mem)


@dataclass(frozen=True)
class Literal:
    """``L(state, coloring)`` or its complement."""

    state: int
    coloring: frozenset
    negated: bool = False

    def holds(self, dfa: Dfa, u: Sequence[int]) -> bool:
        return (run_word(dfa, self.state, u) in self.coloring) != self.negated


@dataclass(frozen=True)
class AtomFormula:
    """Intersection of literals; ``empty`` marks a formula simplified to ∅."""

    dfa: Dfa
    literals: tuple
    empty: bool = False

    def evaluate(self, u: Sequence[int]) -> bool:
        return not self.empty and all(l.holds(self.dfa, u) for l in self.literals)

    def simplify(self) -> "AtomFormula":
        """Rewrite complements as complementary colorings, drop Σ* terms,
        collapse to ∅ on an empty coloring, and deduplicate."""
        full = frozenset(self.dfa.states)
        seen = []
        for lit in self.literals:
            U = full - lit.coloring if lit.negated else lit.coloring
            if not U:
                return AtomFormula(self.dfa, (), True)
            if U == full:
                continue
            norm = Literal(lit.state, U)
            if norm not in seen:
                seen.append(norm)
        seen.sort(key=lambda l: (l.state, sorted(l.coloring)))
        return AtomFormula(self.dfa, tuple(seen))

    def render(self, state_names=None) -> str:
        if self.empty:
            return "∅"
        if not self.literals:
            return "Σ*"
        name = (lambda s: str(s)) if state_names is None else (lambda s: state_names[s])
        parts = []
        for l in self.literals:
            U = ",".join(name(s) for s in sorted(l.coloring))
            term = f"L({name(l.state)},{{{U}}})"
            parts.append(f"¬{term}" if l.negated else term)
        return " ∩ ".join(parts)


def atom_decomposition(a: AcceptingDfa, q: int, colorings_from: str = "reachable", m=None) -> AtomFormula:
    """Boolean formula over ``L(x, U)`` whose language is the atom ``{q}`` of
    ``mupl(a)``.

    ``colorings_from="reachable"`` ranges U over the subsets reachable from
    the accepting set; ``"all"`` over every subset of the state space.
    """
    if m is None:
        m = mupl(a, max_classes=None)
    w = m.table.representative[q]
    wr = reverse(w)
    if colorings_from == "reachable":
        us = list(m.lift.states)
    elif colorings_from == "all":
        us = colorings(a.dfa.state_count, "all")
    else:
        raise ValueError(colorings_from)
    lits = []
    for x in a.dfa.states:
        target = run_word(a.dfa, x, wr)
        for U in us:
            lits.append(Literal(x, U, target not in U))
    return AtomFormula(a.dfa, tuple(lits))


def sample_masks(n: int, count: int = 8, seed: int = 0) -> list:
    """Deterministic spread of subsets used by the Boolean-closure checks."""
    rng = random.Random(seed)
    full = (1 << n) - 1
    out = [0, full] + [1 << q for q in range(min(n, count))]
    out += [rng.getrandbits(n) for _ in range(count)]
    return out


def preformation_closure_check(m: SubsetAutomaton, samples: int = 4) -> bool:
    """Structural check that the subset automaton is a preformation of languages.

    Languages are ``L(U) = {u | [reverse(u)] in U}``.  Right derivatives must
    be the automaton transitions and left derivatives the left action of the
    congruence; both are compared against classes recomputed from words, one
    class at a time.  Complement, union and intersection must commute with
    every transition and with acceptance, checked on a deterministic sample
    of subsets and all their pairwise combinations.
    """
    t = m.table
    n = t.class_count
    k = len(t.alphabet)
    full = (1 << n) - 1
    for a in range(k):
        # a^{-1} L({p}) = L({q | [rep(q) a] = p})
        covered = 0
        for q in range(n):
            p = t.class_of(t.representative[q] + (a,))
            if not m.step(1 << p, a) >> q & 1:
                return False
            covered += 1
        if sum(bin(m.step(1 << p, a)).count("1") for p in range(n)) != covered:
            return False
        # L({p}) a^{-1} = L({q | [a rep(q)] = p})
        for q in range(n):
            if t.left_step[a][q] != t.class_of((a,) + t.representative[q]):
                return False
    masks = sample_masks(n, samples)
    steps = {U: [m.step(U, a) for a in range(k)] for U in masks}
    for U in masks:
        if m.is_accepting(full ^ U) == m.is_accepting(U):
            return False
        for a in range(k):
            if m.step(full ^ U, a) != full ^ steps[U][a]:
                return False
    for i, U in enumerate(masks):
        for V in masks[i + 1:]:
            if m.is_accepting(U | V) != (m.is_accepting(U) or m.is_accepting(V)):
                return False
            if m.is_accepting(U & V) != (m.is_accepting(U) and m.is_accepting(V)):
                return False
            for a in range(k):
                if m.step(U | V, a) != steps[U][a] | steps[V][a]:
                    return False
                if m.step(U & V, a) != steps[U][a] & steps[V][a]:
                    return False
    return True


def boolean_closure_is_powerset(n: int, family) -> bool:
    """Does the Boolean algebra generated by ``family`` (subsets of range(n))
    separate every pair of points, i.e. equal the full powerset?"""
    family = list(family)
    sig = [tuple(x in S for S in family) for x in range(n)]
    return len(set(sig)) == n


def embed_cofree_check(a: AcceptingDfa, m: Optional[MuplAutomaton] = None):
    """``True``/``False`` if the powerset hypothesis holds, else the string
    ``"hypothesis-failed"``.

    For each state x and coloring U the predicted state
    ``V = {q | delta(x, reverse(rep(q))) in U}`` must have language exactly
    ``L(x, U)``; decided by a pair search over (class, subset of X).
    """
    if m is None:
        m = mupl(a, max_classes=None)
    if not boolean_closure_is_powerset(a.dfa.state_count, m.lift.states):
        return "hypothesis-failed"
    t = m.table
    k = len(a.alphabet)
    n = a.dfa.state_count
    # inv[c][S] = {x | delta(x, c) in S} on bitmasks of states
    inv = [
        [sum(1 << x for x in range(n) if S >> a.dfa.delta[x][c] & 1) for S in range(1 << n)]
        for c in range(k)
    ]
    targets = [[run_word(a.dfa, x, reverse(w)) for w in t.representative] for x in range(n)]
    for U in range(1 << n):
        # word v reaches (class [v], {x | delta(x, reverse(v)) in U})
        start = (t.eps_class, U)
        seen = {start}
        queue = deque([start])
        while queue:
            q, S = queue.popleft()
            for c in range(k):
                nxt = (t.right_step[q][c], inv[c][S])
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        for x in range(n):
            V = mask_of(q for q, y in enumerate(targets[x]) if U >> y & 1)
            # L(V) = L(x, U) iff class membership in V decides x's membership
            if any(bool(S >> x & 1) != bool(V >> q & 1) for q, S in seen):
                return False
    return True


def mupl_minimality(m: SubsetAutomaton, materialize_limit: int = 12) -> bool:
    """Is bisimilarity on the subset automaton discrete?

    Up to ``materialize_limit`` classes the full automaton is built and
    partition refinement is run.  Beyond that we use that every transition
    and the acceptance test are Boolean algebra maps (inverse images), so the
    atoms have pairwise disjoint languages and the language map is injective
    iff no atom has empty language.  Atom ``{q}`` is probed by running the
    automaton on the reversal of ``q``'s representative.
    """
    n = m.class_count
    if n <= materialize_limit:
        return bisimilarity_partition(m.as_accepting()).is_discrete()
    t = m.table
    return all(m.is_accepting(m.run(1 << q, reverse(t.representative[q]))) for q in range(n))
