"""One-sorted deterministic automata.

States are dense integer indices ``0 .. n-1`` and letters are indices into an
:class:`Alphabet`.  A word is a tuple of letter indices.  Everything here is
immutable; constructions return fresh objects.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

Word = tuple  # tuple[int, ...]
EPSILON: Word = ()


class AutomatonError(Exception):
    """Base class for errors raised by this package."""


class ContractViolation(AutomatonError):
    """An operation was called on a value missing required structure."""


class AlphabetMismatch(AutomatonError):
    pass


class SizeGuardError(AutomatonError):
    """A construction would exceed a configured size bound."""


@dataclass(frozen=True)
class LawResult:
    """Outcome of one executable law check."""

    name: str
    ok: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in {self.symbols!r}")

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    def word(self, text) -> Word:
        """Parse ``text`` into a word.

        A string is split into characters when every symbol is a single
        character, otherwise on whitespace or ``.``.  ``""`` and ``"ε"`` give
        the empty word.  Sequences of symbols are accepted as-is.
        """
        if isinstance(text, str):
            if text in ("", "ε"):
                return EPSILON
            if all(len(s) == 1 for s in self.symbols):
                parts = list(text)
            else:
                parts = text.replace(".", " ").split()
        else:
            parts = list(text)
        return tuple(self.index(p) for p in parts)

    def format(self, w: Word) -> str:
        if not w:
            return "ε"
        sep = "" if all(len(s) == 1 for s in self.symbols) else "."
        return sep.join(self.symbols[a] for a in w)


def shortlex_key(w: Word):
    return (len(w), w)


def words_upto(alphabet_size: int, maxlen: int) -> Iterator[Word]:
    """All words of length <= maxlen, in shortlex order."""
    for n in range(maxlen + 1):
        yield from product(range(alphabet_size), repeat=n)


@dataclass(frozen=True)
class Dfa:
    state_count: int
    alphabet: Alphabet
    delta: tuple  # delta[state][letter] -> state

    def __post_init__(self):
        delta = tuple(tuple(row) for row in self.delta)
        object.__setattr__(self, "delta", delta)
        if self.state_count < 1:
            raise ValueError("a DFA needs at least one state")
        if len(delta) != self.state_count:
            raise ValueError(f"delta has {len(delta)} rows, expected {self.state_count}")
        k = len(self.alphabet)
        for s, row in enumerate(delta):
            if len(row) != k:
                raise ValueError(f"state {s}: transition row is not total")
            for t in row:
                if not 0 <= t < self.state_count:
                    raise ValueError(f"state {s}: target {t} out of range")

    @property
    def states(self) -> range:
        return range(self.state_count)

    def step(self, s: int, a: int) -> int:
        return self.delta[s][a]


@dataclass(frozen=True)
class PointedDfa:
    dfa: Dfa
    initial: int

    def __post_init__(self):
        if not 0 <= self.initial < self.dfa.state_count:
            raise ValueError(f"initial state {self.initial} out of range")

    @property
    def alphabet(self) -> Alphabet:
        return self.dfa.alphabet


@dataclass(frozen=True)
class AcceptingDfa:
    dfa: Dfa
    accepting: frozenset = frozenset()
    initial: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        for s in self.accepting:
            if not 0 <= s < self.dfa.state_count:
                raise ValueError(f"accepting state {s} out of range")
        if self.initial is not None and not 0 <= self.initial < self.dfa.state_count:
            raise ValueError(f"initial state {self.initial} out of range")

    @property
    def alphabet(self) -> Alphabet:
        return self.dfa.alphabet

    def pointed(self) -> PointedDfa:
        if self.initial is None:
            raise ContractViolation("automaton has no initial state")
        return PointedDfa(self.dfa, self.initial)

    def with_initial(self, initial: Optional[int]) -> "AcceptingDfa":
        return AcceptingDfa(self.dfa, self.accepting, initial)


@dataclass(frozen=True)
class Partition:
    """An equivalence relation on ``range(element_count)``.

    Class ids are contiguous and ordered by least member.
    """

    class_of: tuple
    element_count: int = field(init=False)

    def __post_init__(self):
        labels = tuple(self.class_of)
        renum: dict = {}
        canon = tuple(renum.setdefault(c, len(renum)) for c in labels)
        object.__setattr__(self, "class_of", canon)
        object.__setattr__(self, "element_count", len(canon))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable) -> "Partition":
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, j in pairs:
            ri, rj = find(i), find(j)
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj
        return cls(tuple(find(i) for i in range(n)))

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @property
    def class_count(self) -> int:
        return max(self.class_of, default=-1) + 1

    def classes(self) -> list:
        out = [[] for _ in range(self.class_count)]
        for e, c in enumerate(self.class_of):
            out[c].append(e)
        return out

    def same(self, i: int, j: int) -> bool:
        return self.class_of[i] == self.class_of[j]

    def is_discrete(self) -> bool:
        return self.class_count == self.element_count


def run_word(dfa: Dfa, start: int, w: Sequence[int]) -> int:
    s = start
    delta = dfa.delta
    for a in w:
        s = delta[s][a]
    return s


def accepts(a: AcceptingDfa, w: Sequence[int]) -> bool:
    if a.initial is None:
        raise ContractViolation("accepts() needs an initial state")
    return run_word(a.dfa, a.initial, w) in a.accepting


def language_upto(a: AcceptingDfa, start: int, maxlen: int) -> list:
    """Accepted words from ``start`` of length <= maxlen, shortlex order."""
    if maxlen < 0:
        raise ValueError("maxlen must be >= 0")
    out = []
    level = [(EPSILON, start)]
    k = len(a.alphabet)
    for n in range(maxlen + 1):
        for w, s in level:
            if s in a.accepting:
                out.append(w)
        if n == maxlen:
            break
        level = [(w + (c,), a.dfa.delta[s][c]) for w, s in level for c in range(k)]
    return out


def languages_agree_upto(a: AcceptingDfa, s: int, b: AcceptingDfa, t: int, maxlen: int):
    """Decide ``language_upto(a, s, n) == language_upto(b, t, n)`` without
    enumerating words: walk the pair automaton level by level.

    Returns ``None`` on agreement, else the shortlex-least differing word.
    """
    k = len(a.alphabet)
    level = {(s, t): EPSILON}
    for n in range(maxlen + 1):
        bad = [w for (p, q), w in level.items() if (p in a.accepting) != (q in b.accepting)]
        if bad:
            return min(bad)
        if n == maxlen:
            return None
        nxt: dict = {}
        for (p, q), w in sorted(level.items(), key=lambda kv: kv[1]):
            for c in range(k):
                key = (a.dfa.delta[p][c], b.dfa.delta[q][c])
                if key not in nxt:
                    nxt[key] = w + (c,)
        level = nxt
    return None


def equivalent_states(a: AcceptingDfa, s: int, b: AcceptingDfa, t: int):
    """Exact language equivalence of state ``s`` of ``a`` and ``t`` of ``b``.

    Returns ``None`` if equivalent, else a shortest distinguishing word.
    """
    k = len(a.alphabet)
    seen = {(s, t): EPSILON}
    queue = deque([(s, t)])
    while queue:
        p, q = queue.popleft()
        w = seen[(p, q)]
        if (p in a.accepting) != (q in b.accepting):
            return w
        for c in range(k):
            nxt = (a.dfa.delta[p][c], b.dfa.delta[q][c])
            if nxt not in seen:
                seen[nxt] = w + (c,)
                queue.append(nxt)
    return None


def reachable_part(p: PointedDfa):
    """Restrict to states reachable from the initial state.

    States are renumbered in BFS order (letters in alphabet order).  Returns
    ``(pointed, mapping)`` where ``mapping`` sends old indices to new ones.
    """
    dfa = p.dfa
    mapping = {p.initial: 0}
    order = [p.initial]
    queue = deque(order)
    while queue:
        s = queue.popleft()
        for t in dfa.delta[s]:
            if t not in mapping:
                mapping[t] = len(order)
                order.append(t)
                queue.append(t)
    delta = tuple(tuple(mapping[t] for t in dfa.delta[s]) for s in order)
    return PointedDfa(Dfa(len(order), dfa.alphabet, delta), 0), mapping


def is_reachable(p: PointedDfa) -> bool:
    return len(reachable_part(p)[1]) == p.dfa.state_count


def restrict_accepting(a: AcceptingDfa):
    """Reachable part of a pointed accepting automaton, acceptance carried along."""
    p, mapping = reachable_part(a.pointed())
    acc = frozenset(mapping[s] for s in a.accepting if s in mapping)
    return AcceptingDfa(p.dfa, acc, 0), mapping


def is_morphism(src: PointedDfa, dst: PointedDfa, f: Sequence[int]) -> bool:
    if f[src.initial] != dst.initial:
        return False
    k = len(src.alphabet)
    return all(
        f[src.dfa.delta[s][a]] == dst.dfa.delta[f[s]][a]
        for s in range(src.dfa.state_count)
        for a in range(k)
    )


def unique_morphism(src: PointedDfa, dst: PointedDfa) -> Optional[tuple]:
    """The pointed-automaton morphism ``src -> dst`` if one exists.

    ``src`` must be reachable, which makes the morphism unique when it exists.
    """
    if src.alphabet != dst.alphabet:
        raise AlphabetMismatch("morphisms need a shared alphabet")
    n = src.dfa.state_count
    f: list = [None] * n
    f[src.initial] = dst.initial
    queue = deque([src.initial])
    while queue:
        s = queue.popleft()
        for a, t in enumerate(src.dfa.delta[s]):
            image = dst.dfa.delta[f[s]][a]
            if f[t] is None:
                f[t] = image
                queue.append(t)
            elif f[t] != image:
                return None
    if None in f:
        raise ContractViolation("source automaton is not reachable")
    return tuple(f)


def refine(labels: Sequence, successors) -> Partition:
    """Moore-style refinement: coarsest partition below ``labels`` that is
    closed under ``successors(state) -> tuple of states``."""
    part = Partition(tuple(labels))
    while True:
        sig = tuple(
            (part.class_of[s], tuple(part.class_of[t] for t in successors(s)))
            for s in range(part.element_count)
        )
        nxt = Partition(sig)
        if nxt.class_count == part.class_count:
            return nxt
        part = nxt


def bisimilarity_partition(a: AcceptingDfa) -> Partition:
    return refine(
        [s in a.accepting for s in range(a.dfa.state_count)],
        lambda s: a.dfa.delta[s],
    )


def quotient(a: AcceptingDfa, part: Partition) -> AcceptingDfa:
    """Quotient by a partition that is a bisimulation."""
    reps = [cls[0] for cls in part.classes()]
    delta = tuple(tuple(part.class_of[t] for t in a.dfa.delta[r]) for r in reps)
    acc = frozenset(part.class_of[s] for s in a.accepting)
    init = None if a.initial is None else part.class_of[a.initial]
    return AcceptingDfa(Dfa(len(reps), a.alphabet, delta), acc, init)


def terminal_pointed(alphabet: Alphabet) -> PointedDfa:
    return PointedDfa(Dfa(1, alphabet, ((0,) * len(alphabet),)), 0)


def product_pointed(ps: Sequence[PointedDfa], alphabet: Optional[Alphabet] = None):
    """Reachable part of the componentwise product.

    Returns ``(pointed, tuples)`` where ``tuples[i]`` is the component state
    tuple behind product state ``i``.  The empty product is the one-state
    automaton over ``alphabet``.
    """
    ps = list(ps)
    if not ps:
        if alphabet is None:
            raise ValueError("the empty product needs an explicit alphabet")
        return terminal_pointed(alphabet), [()]
    alpha = ps[0].alphabet
    if alphabet is not None and alphabet != alpha:
        raise AlphabetMismatch("alphabet argument disagrees with the automata")
    for p in ps[1:]:
        if p.alphabet != alpha:
            raise AlphabetMismatch("product components must share an alphabet")
    k = len(alpha)
    start = tuple(p.initial for p in ps)
    index = {start: 0}
    tuples = [start]
    rows = []
    i = 0
    while i < len(tuples):
        cur = tuples[i]
        row = []
        for a in range(k):
            nxt = tuple(p.dfa.delta[s][a] for p, s in zip(ps, cur))
            if nxt not in index:
                index[nxt] = len(tuples)
                tuples.append(nxt)
            row.append(index[nxt])
        rows.append(tuple(row))
        i += 1
    return PointedDfa(Dfa(len(tuples), alpha, tuple(rows)), 0), tuples


def canonical_form(p: PointedDfa) -> tuple:
    """Transition table of the reachable part, BFS-numbered; equal iff isomorphic."""
    r, _ = reachable_part(p)
    return r.dfa.delta


def isomorphic(p: PointedDfa, q: PointedDfa) -> bool:
    return p.alphabet == q.alphabet and canonical_form(p) == canonical_form(q)
