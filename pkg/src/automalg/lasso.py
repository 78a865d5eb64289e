"""Two-sorted lasso automata.

A lasso automaton has a first sort X1 (driven by spokes through ``delta1``),
a second sort X2 entered by the first loop letter through ``delta2`` and
driven by ``delta3``.  Indices of the two sorts are kept separate.

Lasso congruences are presented by their word part (a :class:`CongruenceRep`)
and finitely many lasso classes, each a behaviour function ``X1 -> X2``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    EPSILON,
    AcceptingDfa,
    Alphabet,
    AlphabetMismatch,
    ContractViolation,
    Dfa,
    Partition,
    SizeGuardError,
    refine,
    run_word,
    words_upto,
)
from .monoid import CongruenceRep, function_closure, kernel_congruence

DEFAULT_MAX_CLASSES = 20


@dataclass(frozen=True, order=True)
class Lasso:
    spoke: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "spoke", tuple(self.spoke))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("a lasso needs a nonempty loop")

    @classmethod
    def parse(cls, alphabet: Alphabet, text: str) -> "Lasso":
        """``"u,v"`` or ``"(u,v)"`` with words in :meth:`Alphabet.word` syntax."""
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        if "," not in body:
            raise ValueError(f"lasso {text!r} must look like spoke,loop")
        u, v = body.split(",", 1)
        return cls(alphabet.word(u.strip()), alphabet.word(v.strip()))

    def format(self, alphabet: Alphabet) -> str:
        return f"({alphabet.format(self.spoke)},{alphabet.format(self.loop)})"

    def key(self):
        """Canonical order: total length, spoke length, then letters."""
        return (len(self.spoke) + len(self.loop), len(self.spoke), self.spoke, self.loop)

    def reversed_rotation(self) -> "Lasso":
        """``(u, a v) -> (v^r, a u^r)``."""
        a, v = self.loop[0], self.loop[1:]
        return Lasso(tuple(reversed(v)), (a,) + tuple(reversed(self.spoke)))


def lassos_upto(alphabet_size: int, max_spoke: int, max_loop: int):
    """Lassos with bounded spoke and loop, in :meth:`Lasso.key` order."""
    out = [
        Lasso(u, v)
        for u in words_upto(alphabet_size, max_spoke)
        for v in words_upto(alphabet_size, max_loop)
        if v
    ]
    out.sort(key=Lasso.key)
    return out


@dataclass(frozen=True)
class LassoAutomaton:
    alphabet: Alphabet
    x1_count: int
    x2_count: int
    delta1: tuple  # X1 x letter -> X1
    delta2: tuple  # X1 x letter -> X2
    delta3: tuple  # X2 x letter -> X2
    initial: Optional[int] = None
    accepting: Optional[frozenset] = None

    def __post_init__(self):
        for name in ("delta1", "delta2", "delta3"):
            object.__setattr__(self, name, tuple(tuple(r) for r in getattr(self, name)))
        if self.accepting is not None:
            object.__setattr__(self, "accepting", frozenset(self.accepting))
        k = len(self.alphabet)
        if self.x1_count < 1 or self.x2_count < 1:
            raise ValueError("both sorts need at least one state")
        for name, rows, n_src, n_dst in (
            ("delta1", self.delta1, self.x1_count, self.x1_count),
            ("delta2", self.delta2, self.x1_count, self.x2_count),
            ("delta3", self.delta3, self.x2_count, self.x2_count),
        ):
            if len(rows) != n_src or any(len(r) != k for r in rows):
                raise ValueError(f"{name} is not a total table")
            if any(not 0 <= t < n_dst for r in rows for t in r):
                raise ValueError(f"{name} target out of range")
        if self.initial is not None and not 0 <= self.initial < self.x1_count:
            raise ValueError("initial state out of range")
        if self.accepting is not None and any(not 0 <= y < self.x2_count for y in self.accepting):
            raise ValueError("accepting state out of range")

    def with_initial(self, initial) -> "LassoAutomaton":
        return LassoAutomaton(
            self.alphabet, self.x1_count, self.x2_count,
            self.delta1, self.delta2, self.delta3, initial, self.accepting,
        )

    def with_accepting(self, accepting) -> "LassoAutomaton":
        return LassoAutomaton(
            self.alphabet, self.x1_count, self.x2_count,
            self.delta1, self.delta2, self.delta3, self.initial,
            None if accepting is None else frozenset(accepting),
        )

    def word_dfa(self) -> Dfa:
        return Dfa(self.x1_count, self.alphabet, self.delta1)

    def loop_dfa(self) -> AcceptingDfa:
        """The second sort as a one-sorted automaton with the accepting set."""
        return AcceptingDfa(Dfa(self.x2_count, self.alphabet, self.delta3), self.accepting or frozenset())

    def require_initial(self) -> int:
        if self.initial is None:
            raise ContractViolation("lasso automaton has no initial state")
        return self.initial

    def require_accepting(self) -> frozenset:
        if self.accepting is None:
            raise ContractViolation("lasso automaton has no accepting set")
        return self.accepting


def run_loop(la: LassoAutomaton, x: int, v: Sequence[int]) -> int:
    """``delta∘(x, v)``: first letter through delta2, the rest through delta3."""
    if not v:
        raise ValueError("loop must be nonempty")
    y = la.delta2[x][v[0]]
    for a in v[1:]:
        y = la.delta3[y][a]
    return y


def run_lasso(la: LassoAutomaton, x: int, l: Lasso) -> int:
    return run_loop(la, run_word(la.word_dfa(), x, l.spoke), l.loop)


def lasso_accepts(la: LassoAutomaton, l: Lasso, start: Optional[int] = None) -> bool:
    x = la.require_initial() if start is None else start
    return run_lasso(la, x, l) in la.require_accepting()


def lasso_language_upto(la: LassoAutomaton, x: int, max_spoke: int, max_loop: int) -> list:
    acc = la.require_accepting()
    return [l for l in lassos_upto(len(la.alphabet), max_spoke, max_loop) if run_lasso(la, x, l) in acc]


def lasso_reachable_part(la: LassoAutomaton):
    """Restrict to reachable states; returns ``(automaton, map1, map2)``.

    X1 is numbered in BFS order from the initial state; X2 lists the delta2
    images (by X1 order, then letter) and then closes under delta3.
    """
    x0 = la.require_initial()
    k = len(la.alphabet)
    map1 = {x0: 0}
    order1 = [x0]
    i = 0
    while i < len(order1):
        for a in range(k):
            t = la.delta1[order1[i]][a]
            if t not in map1:
                map1[t] = len(order1)
                order1.append(t)
        i += 1
    map2: dict = {}
    order2: list = []
    for x in order1:
        for a in range(k):
            t = la.delta2[x][a]
            if t not in map2:
                map2[t] = len(order2)
                order2.append(t)
    i = 0
    while i < len(order2):
        for a in range(k):
            t = la.delta3[order2[i]][a]
            if t not in map2:
                map2[t] = len(order2)
                order2.append(t)
        i += 1
    d1 = tuple(tuple(map1[t] for t in la.delta1[x]) for x in order1)
    d2 = tuple(tuple(map2[t] for t in la.delta2[x]) for x in order1)
    d3 = tuple(tuple(map2[t] for t in la.delta3[y]) for y in order2)
    acc = None if la.accepting is None else frozenset(map2[y] for y in la.accepting if y in map2)
    out = LassoAutomaton(la.alphabet, len(order1), len(order2), d1, d2, d3, 0, acc)
    return out, map1, map2


def is_lasso_reachable(la: LassoAutomaton) -> bool:
    r, _, _ = lasso_reachable_part(la)
    return r.x1_count == la.x1_count and r.x2_count == la.x2_count


@dataclass(frozen=True)
class LassoCongruenceRep:
    word_part: CongruenceRep
    lasso_count: int
    lasso_rep: tuple  # Lasso per class, minimal in Lasso.key order
    sigma2: tuple  # sigma2[q][a] = [(rep(q), a)]
    sigma3: tuple  # sigma3[p][a] = [(u, v a)]
    left_ext: tuple  # left_ext[a][p] = [(a u, v)]
    accepted: Optional[frozenset] = None

    @property
    def alphabet(self) -> Alphabet:
        return self.word_part.alphabet

    def class_of(self, l: Lasso) -> int:
        p = self.sigma2[self.word_part.class_of(l.spoke)][l.loop[0]]
        for a in l.loop[1:]:
            p = self.sigma3[p][a]
        return p

    def with_accepted(self, accepted) -> "LassoCongruenceRep":
        return LassoCongruenceRep(
            self.word_part, self.lasso_count, self.lasso_rep, self.sigma2,
            self.sigma3, self.left_ext, None if accepted is None else frozenset(accepted),
        )

    def tables(self) -> tuple:
        return (
            self.word_part.tables(), self.lasso_count, self.lasso_rep,
            self.sigma2, self.sigma3, self.left_ext,
        )

    def check(self) -> None:
        """Congruence laws and representative consistency; AssertionError on failure."""
        w = self.word_part
        w.check()
        k = len(self.alphabet)
        for p, l in enumerate(self.lasso_rep):
            assert self.class_of(l) == p, f"representative of lasso class {p} is misfiled"
        for a in range(k):
            for b in range(k):
                for p in range(self.lasso_count):
                    assert self.left_ext[a][self.sigma3[p][b]] == self.sigma3[self.left_ext[a][p]][b]
                for q in range(w.class_count):
                    assert self.left_ext[a][self.sigma2[q][b]] == self.sigma2[w.left_step[a][q]][b]


def _behaviour_tables(la: LassoAutomaton, word_dfa: Dfa) -> LassoCongruenceRep:
    k = len(la.alphabet)
    n1 = la.x1_count
    word_part = kernel_congruence(word_dfa)
    funcs, _, _ = function_closure(word_dfa)

    # loop behaviours g_v : X1 -> X2, explored shortlex
    g_index: dict = {}
    g_funcs: list = []
    g_words: list = []
    for a in range(k):
        g = tuple(la.delta2[x][a] for x in range(n1))
        if g not in g_index:
            g_index[g] = len(g_funcs)
            g_funcs.append(g)
            g_words.append((a,))
    i = 0
    while i < len(g_funcs):
        for a in range(k):
            g = tuple(la.delta3[y][a] for y in g_funcs[i])
            if g not in g_index:
                g_index[g] = len(g_funcs)
                g_funcs.append(g)
                g_words.append(g_words[i] + (a,))
        i += 1

    best: dict = {}
    for f, u in zip(funcs, word_part.representative):
        for g, v in zip(g_funcs, g_words):
            ell = tuple(g[f[x]] for x in range(n1))
            cand = Lasso(u, v)
            cur = best.get(ell)
            if cur is None or cand.key() < cur.key():
                best[ell] = cand
    order = sorted(best, key=lambda ell: best[ell].key())
    index = {ell: i for i, ell in enumerate(order)}
    sigma2 = tuple(
        tuple(index[tuple(la.delta2[f[x]][a] for x in range(n1))] for a in range(k)) for f in funcs
    )
    sigma3 = tuple(tuple(index[tuple(la.delta3[y][a] for y in ell)] for a in range(k)) for ell in order)
    left = tuple(
        tuple(index[tuple(ell[word_dfa.delta[x][a]] for x in range(n1))] for ell in order)
        for a in range(k)
    )
    return LassoCongruenceRep(word_part, len(order), tuple(best[e] for e in order), sigma2, sigma3, left)


def eq_set(la: LassoAutomaton) -> LassoCongruenceRep:
    """Largest set of equations satisfied by ``la``: lassos are identified
    iff they act identically from every X1 state."""
    return _behaviour_tables(la, la.word_dfa())


def lasso_transition(la: LassoAutomaton) -> LassoCongruenceRep:
    """Transition congruence of the reachable part of a pointed automaton."""
    r, _, _ = lasso_reachable_part(la)
    return eq_set(r)


def lasso_transition_with_acceptance(la: LassoAutomaton) -> LassoCongruenceRep:
    r, _, _ = lasso_reachable_part(la)
    c = eq_set(r)
    acc = r.require_accepting()
    return c.with_accepted(p for p, l in enumerate(c.lasso_rep) if run_lasso(r, 0, l) in acc)


def lasso_machine(c: LassoCongruenceRep) -> LassoAutomaton:
    w = c.word_part
    return LassoAutomaton(
        c.alphabet, w.class_count, c.lasso_count, w.right_step, c.sigma2, c.sigma3,
        w.eps_class, c.accepted,
    )


def lasso_nuc(la: LassoAutomaton, accepting=None) -> LassoAutomaton:
    """Machine of the transition congruence of the reachable part.  With
    ``accepting`` (a subset of the original X2) the lasso class ``[l]`` is
    accepting iff the original run of ``l`` from the initial state ends in it."""
    c = lasso_transition(la)
    if accepting is not None:
        x0 = la.require_initial()
        c = c.with_accepted(p for p, l in enumerate(c.lasso_rep) if run_lasso(la, x0, l) in accepting)
    return lasso_machine(c)


def lasso_is_morphism(src: LassoAutomaton, dst: LassoAutomaton, f1, f2) -> bool:
    if src.initial is not None and f1[src.initial] != dst.initial:
        return False
    k = len(src.alphabet)
    for x in range(src.x1_count):
        for a in range(k):
            if f1[src.delta1[x][a]] != dst.delta1[f1[x]][a]:
                return False
            if f2[src.delta2[x][a]] != dst.delta2[f1[x]][a]:
                return False
    return all(
        f2[src.delta3[y][a]] == dst.delta3[f2[y]][a] for y in range(src.x2_count) for a in range(k)
    )


def lasso_unique_morphism(src: LassoAutomaton, dst: LassoAutomaton):
    """``(f1, f2)`` for the pointed morphism from a reachable ``src``, or None."""
    if src.alphabet != dst.alphabet:
        raise AlphabetMismatch("morphisms need a shared alphabet")
    s0, d0 = src.require_initial(), dst.require_initial()
    k = len(src.alphabet)
    f1: list = [None] * src.x1_count
    f2: list = [None] * src.x2_count
    f1[s0] = d0

    def assign(f, s, image, queue):
        if f[s] is None:
            f[s] = image
            queue.append(s)
            return True
        return f[s] == image

    q1 = deque([s0])
    q2: deque = deque()
    while q1:
        x = q1.popleft()
        for a in range(k):
            if not assign(f1, src.delta1[x][a], dst.delta1[f1[x]][a], q1):
                return None
            if not assign(f2, src.delta2[x][a], dst.delta2[f1[x]][a], q2):
                return None
    while q2:
        y = q2.popleft()
        for a in range(k):
            if not assign(f2, src.delta3[y][a], dst.delta3[f2[y]][a], q2):
                return None
    if None in f1 or None in f2:
        raise ContractViolation("source lasso automaton is not reachable")
    return tuple(f1), tuple(f2)


def lasso_isomorphic(p: LassoAutomaton, q: LassoAutomaton, with_acceptance: bool = False) -> bool:
    """Isomorphism of reachable parts, via unique morphisms in both directions."""
    rp, _, _ = lasso_reachable_part(p)
    rq, _, _ = lasso_reachable_part(q)
    if (rp.x1_count, rp.x2_count) != (rq.x1_count, rq.x2_count):
        return False
    there = lasso_unique_morphism(rp, rq)
    back = lasso_unique_morphism(rq, rp)
    if there is None or back is None:
        return False
    if with_acceptance:
        f2 = there[1]
        acc_p, acc_q = rp.require_accepting(), rq.require_accepting()
        return all((y in acc_p) == (f2[y] in acc_q) for y in range(rp.x2_count))
    return True


def lasso_counit(la: LassoAutomaton):
    """``([u] -> delta1(x0, u), [(u, v)] -> delta(x0, (u, v)))``, checked to be a morphism."""
    c = lasso_transition(la)
    x0 = la.require_initial()
    e1 = tuple(run_word(la.word_dfa(), x0, u) for u in c.word_part.representative)
    e2 = tuple(run_lasso(la, x0, l) for l in c.lasso_rep)
    if not lasso_is_morphism(lasso_machine(c), la, e1, e2):
        raise AssertionError("lasso counit failed to be a morphism")
    return e1, e2


def lasso_refinement_witness(c: LassoCongruenceRep, d: LassoCongruenceRep):
    """``None`` if ``c`` is contained in ``d`` on both sorts, else a pair of
    words or lassos identified by ``c`` but not by ``d``."""
    if c.alphabet != d.alphabet:
        raise AlphabetMismatch("congruences over different alphabets")
    k = len(c.alphabet)
    cw, dw = c.word_part, d.word_part
    start = (cw.eps_class, dw.eps_class)
    seen = {start: EPSILON}
    image = {cw.eps_class: (dw.eps_class, EPSILON)}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        w = seen[pair]
        for a in range(k):
            nxt = (cw.right_step[pair[0]][a], dw.right_step[pair[1]][a])
            if nxt in seen:
                continue
            seen[nxt] = w + (a,)
            prev = image.setdefault(nxt[0], (nxt[1], w + (a,)))
            if prev[0] != nxt[1]:
                return prev[1], w + (a,)
            queue.append(nxt)
    lseen: dict = {}
    limage: dict = {}
    lqueue: deque = deque()

    def visit(pc, pd, l):
        if (pc, pd) in lseen:
            return None
        lseen[(pc, pd)] = l
        prev = limage.setdefault(pc, (pd, l))
        if prev[0] != pd:
            return prev[1], l
        lqueue.append((pc, pd))
        return None

    for (qc, qd), w in seen.items():
        for a in range(k):
            bad = visit(c.sigma2[qc][a], d.sigma2[qd][a], Lasso(w, (a,)))
            if bad:
                return bad
    while lqueue:
        pc, pd = lqueue.popleft()
        l = lseen[(pc, pd)]
        for a in range(k):
            bad = visit(c.sigma3[pc][a], d.sigma3[pd][a], Lasso(l.spoke, l.loop + (a,)))
            if bad:
                return bad
    return None


def lasso_congruence_leq(c: LassoCongruenceRep, d: LassoCongruenceRep) -> bool:
    return lasso_refinement_witness(c, d) is None


def satisfies_equations(la: LassoAutomaton, e: LassoCongruenceRep) -> bool:
    return lasso_refinement_witness(e, eq_set(la)) is None


def equations_witness(la: LassoAutomaton, e: LassoCongruenceRep):
    """Equation in ``e`` violated by ``la``, or None."""
    return lasso_refinement_witness(e, eq_set(la))


def lasso_equivalent_states(a: LassoAutomaton, x: int, b: LassoAutomaton, y: int):
    """Exact comparison of the lasso languages of ``a`` at ``x`` and ``b`` at
    ``y``; ``None`` if equal, else a lasso accepted by exactly one side."""
    acc_a, acc_b = a.require_accepting(), b.require_accepting()
    k = len(a.alphabet)
    seen1 = {(x, y): EPSILON}
    queue = deque([(x, y)])
    seen2: dict = {}
    queue2: deque = deque()
    while queue:
        p, q = queue.popleft()
        u = seen1[(p, q)]
        for c in range(k):
            nxt = (a.delta1[p][c], b.delta1[q][c])
            if nxt not in seen1:
                seen1[nxt] = u + (c,)
                queue.append(nxt)
            pair2 = (a.delta2[p][c], b.delta2[q][c])
            if pair2 not in seen2:
                seen2[pair2] = Lasso(u, (c,))
                queue2.append(pair2)
    while queue2:
        p, q = queue2.popleft()
        l = seen2[(p, q)]
        if (p in acc_a) != (q in acc_b):
            return l
        for c in range(k):
            nxt = (a.delta3[p][c], b.delta3[q][c])
            if nxt not in seen2:
                seen2[nxt] = Lasso(l.spoke, l.loop + (c,))
                queue2.append(nxt)
    return None


def satisfies_coequations(la: LassoAutomaton, d: LassoAutomaton) -> bool:
    """Every X1 state of ``la`` has the lasso language of some X1 state of ``d``."""
    return all(
        any(lasso_equivalent_states(la, x, d, s) is None for s in range(d.x1_count))
        for x in range(la.x1_count)
    )


def satisfies_coequations_all_colorings(la: LassoAutomaton, d: LassoAutomaton) -> bool:
    """The all-colorings reading: ``(la, c)`` satisfies ``d`` for every c ⊆ X2."""
    n2 = la.x2_count
    for mask in range(1 << n2):
        c = frozenset(y for y in range(n2) if mask >> y & 1)
        if not satisfies_coequations(la.with_accepting(c), d):
            return False
    return True


def lasso_bisimilarity(la: LassoAutomaton):
    """Coarsest two-sorted bisimulation respecting acceptance on X2.

    Returns ``(partition of X1, partition of X2)``.
    """
    acc = la.require_accepting()
    n1, n2 = la.x1_count, la.x2_count
    labels = [("1",)] * n1 + [("2", y in acc) for y in range(n2)]

    def succ(s):
        if s < n1:
            return la.delta1[s] + tuple(n1 + t for t in la.delta2[s])
        return tuple(n1 + t for t in la.delta3[s - n1])

    part = refine(labels, succ)
    return Partition(part.class_of[:n1]), Partition(part.class_of[n1:])


def lasso_quotient(la: LassoAutomaton, p1: Partition, p2: Partition) -> LassoAutomaton:
    r1 = [c[0] for c in p1.classes()]
    r2 = [c[0] for c in p2.classes()]
    d1 = tuple(tuple(p1.class_of[t] for t in la.delta1[x]) for x in r1)
    d2 = tuple(tuple(p2.class_of[t] for t in la.delta2[x]) for x in r1)
    d3 = tuple(tuple(p2.class_of[t] for t in la.delta3[y]) for y in r2)
    init = None if la.initial is None else p1.class_of[la.initial]
    acc = None if la.accepting is None else frozenset(p2.class_of[y] for y in la.accepting)
    return LassoAutomaton(la.alphabet, len(r1), len(r2), d1, d2, d3, init, acc)


def lasso_minimal(la: LassoAutomaton) -> LassoAutomaton:
    """The minimal automaton of the accepted lasso language."""
    r, _, _ = lasso_reachable_part(la)
    p1, p2 = lasso_bisimilarity(r)
    q = lasso_quotient(r, p1, p2)
    out, _, _ = lasso_reachable_part(q)
    return out


def observable_quotient(la: LassoAutomaton) -> LassoAutomaton:
    """Quotient by bisimilarity without restricting to reachable states."""
    p1, p2 = lasso_bisimilarity(la)
    return lasso_quotient(la, p1, p2)


def syntactic_congruence(la: LassoAutomaton) -> LassoCongruenceRep:
    return eq_set(lasso_minimal(la))


@dataclass(frozen=True)
class MyhillNerode:
    word_classes: Partition  # over the X1 states of the minimal automaton
    word_reps: tuple
    lasso_reps: tuple
    minimal: LassoAutomaton

    def word_class(self, w) -> int:
        return run_word(self.minimal.word_dfa(), self.minimal.initial, w)

    def lasso_class(self, l: Lasso) -> int:
        return run_lasso(self.minimal, self.minimal.initial, l)


def myhill_nerode(la: LassoAutomaton) -> MyhillNerode:
    """Classes of the right-invariant equivalences on words and lassos, as
    the two sorts of the minimal automaton with BFS representatives."""
    m = lasso_minimal(la)
    k = len(la.alphabet)
    reps1: list = [None] * m.x1_count
    reps1[m.initial] = EPSILON
    queue = deque([m.initial])
    while queue:
        x = queue.popleft()
        for a in range(k):
            t = m.delta1[x][a]
            if reps1[t] is None:
                reps1[t] = reps1[x] + (a,)
                queue.append(t)
    reps2: list = [None] * m.x2_count
    queue = deque()
    for x in range(m.x1_count):
        for a in range(k):
            t = m.delta2[x][a]
            if reps2[t] is None:
                reps2[t] = Lasso(reps1[x], (a,))
                queue.append(t)
    while queue:
        y = queue.popleft()
        for a in range(k):
            t = m.delta3[y][a]
            if reps2[t] is None:
                reps2[t] = Lasso(reps2[y].spoke, reps2[y].loop + (a,))
                queue.append(t)
    return MyhillNerode(Partition.discrete(m.x1_count), tuple(reps1), tuple(reps2), m)


def lasso_powerset_lift(la: LassoAutomaton) -> LassoAutomaton:
    """Sort-swapped inverse-image automaton pointed at the accepting set.

    First sort: subsets of X2 reachable from ``accepting``; second sort:
    subsets of X1.  Letters act by inverse images of delta3, delta2, delta1.
    Subsets are stored as bitmasks, recoverable through the returned lists.
    Returns ``(automaton, first_sort_sets, second_sort_sets)``.
    """
    acc = la.require_accepting()
    k = len(la.alphabet)

    def mask(s):
        m = 0
        for y in s:
            m |= 1 << y
        return m

    def inverse(rows, n, target, a):
        out = 0
        for s in range(n):
            if target >> rows[s][a] & 1:
                out |= 1 << s
        return out

    ys = [mask(acc)]
    yi = {ys[0]: 0}
    i = 0
    while i < len(ys):
        for a in range(k):
            t = inverse(la.delta3, la.x2_count, ys[i], a)
            if t not in yi:
                yi[t] = len(ys)
                ys.append(t)
        i += 1
    vs: list = []
    vi: dict = {}
    for U in ys:
        for a in range(k):
            t = inverse(la.delta2, la.x1_count, U, a)
            if t not in vi:
                vi[t] = len(vs)
                vs.append(t)
    i = 0
    while i < len(vs):
        for a in range(k):
            t = inverse(la.delta1, la.x1_count, vs[i], a)
            if t not in vi:
                vi[t] = len(vs)
                vs.append(t)
        i += 1
    d1 = tuple(tuple(yi[inverse(la.delta3, la.x2_count, U, a)] for a in range(k)) for U in ys)
    d2 = tuple(tuple(vi[inverse(la.delta2, la.x1_count, U, a)] for a in range(k)) for U in ys)
    d3 = tuple(tuple(vi[inverse(la.delta1, la.x1_count, V, a)] for a in range(k)) for V in vs)
    out = LassoAutomaton(la.alphabet, len(ys), len(vs), d1, d2, d3, 0, None)
    to_set = lambda m, n: frozenset(s for s in range(n) if m >> s & 1)
    return (
        out,
        tuple(to_set(U, la.x2_count) for U in ys),
        tuple(to_set(V, la.x1_count) for V in vs),
    )


def _members(mask: int) -> list:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class LassoSubsetAutomaton:
    """Two-sorted subset automaton dual to a lasso congruence's machine.

    First-sort states are subsets ``P`` of lasso classes and second-sort
    states subsets ``V`` of word classes, both as bitmasks:
    ``P -a-> {p | sigma3(p, a) in P}`` (first sort), ``P -a-> {q | sigma2(q,
    a) in P}`` (into the second sort) and ``V -a-> {q | right_step(q, a) in
    V}``.  ``V`` accepts iff it holds the epsilon class.
    """

    def __init__(self, table: LassoCongruenceRep):
        self.table = table
        w = table.word_part
        k = len(table.alphabet)
        self._pre1 = [[0] * table.lasso_count for _ in range(k)]
        self._pre2 = [[0] * table.lasso_count for _ in range(k)]
        self._pre3 = [[0] * w.class_count for _ in range(k)]
        for a in range(k):
            for p in range(table.lasso_count):
                self._pre1[a][table.sigma3[p][a]] |= 1 << p
            for q in range(w.class_count):
                self._pre2[a][table.sigma2[q][a]] |= 1 << q
                self._pre3[a][w.right_step[q][a]] |= 1 << q

    @property
    def alphabet(self):
        return self.table.alphabet

    @property
    def lasso_class_count(self) -> int:
        return self.table.lasso_count

    @property
    def word_class_count(self) -> int:
        return self.table.word_part.class_count

    @staticmethod
    def _apply(pre, mask):
        out = 0
        for p in _members(mask):
            out |= pre[p]
        return out

    def step1(self, P: int, a: int) -> int:
        return self._apply(self._pre1[a], P)

    def step2(self, P: int, a: int) -> int:
        return self._apply(self._pre2[a], P)

    def step3(self, V: int, a: int) -> int:
        return self._apply(self._pre3[a], V)

    def is_accepting(self, V: int) -> bool:
        return bool(V >> self.table.word_part.eps_class & 1)

    def run(self, P: int, l: Lasso) -> int:
        for a in l.spoke:
            P = self.step1(P, a)
        V = self.step2(P, l.loop[0])
        for a in l.loop[1:]:
            V = self.step3(V, a)
        return V

    def accepts(self, P: int, l: Lasso) -> bool:
        return self.is_accepting(self.run(P, l))

    def word_accepts(self, V: int, w) -> bool:
        for a in w:
            V = self.step3(V, a)
        return self.is_accepting(V)

    def as_automaton(self, initial=None, max_states: int = 1 << 12) -> LassoAutomaton:
        n1, n2 = 1 << self.lasso_class_count, 1 << self.word_class_count
        if max(n1, n2) > max_states:
            raise SizeGuardError(f"{n1}+{n2} subset states exceed {max_states}")
        k = len(self.alphabet)
        d1 = tuple(tuple(self.step1(P, a) for a in range(k)) for P in range(n1))
        d2 = tuple(tuple(self.step2(P, a) for a in range(k)) for P in range(n1))
        d3 = tuple(tuple(self.step3(V, a) for a in range(k)) for V in range(n2))
        acc = frozenset(V for V in range(n2) if self.is_accepting(V))
        return LassoAutomaton(self.alphabet, n1, n2, d1, d2, d3, initial, acc)


class LassoMupl(LassoSubsetAutomaton):
    def __init__(self, base: LassoAutomaton, lift, table: LassoCongruenceRep, initial):
        super().__init__(table)
        self.base = base
        self.lift = lift
        self.initial = initial


def _guard(n: int, bound) -> None:
    if bound is not None and n > bound:
        raise SizeGuardError(f"{n} classes exceeds the bound of {bound} (2^{n} subsets)")


def eta1_mask(la: LassoAutomaton, table: LassoCongruenceRep, x: int) -> int:
    """``{[(u, a v)] | delta(x, (v^r, a u^r)) in c}``."""
    acc = la.require_accepting()
    m = 0
    for p, l in enumerate(table.lasso_rep):
        if run_lasso(la, x, l.reversed_rotation()) in acc:
            m |= 1 << p
    return m


def eta2_mask(la: LassoAutomaton, table: LassoCongruenceRep, y: int) -> int:
    """``{[u] | delta3(y, u^r) in c}``."""
    acc = la.require_accepting()
    d3 = Dfa(la.x2_count, la.alphabet, la.delta3)
    m = 0
    for q, u in enumerate(table.word_part.representative):
        if run_word(d3, y, tuple(reversed(u))) in acc:
            m |= 1 << q
    return m


def lasso_mupl(la: LassoAutomaton, max_classes: Optional[int] = DEFAULT_MAX_CLASSES) -> LassoMupl:
    lift = lasso_powerset_lift(la)
    table = eq_set(lift[0])
    _guard(table.lasso_count, max_classes)
    _guard(table.word_part.class_count, max_classes)
    init = None if la.initial is None else eta1_mask(la, table, la.initial)
    return LassoMupl(la, lift, table, init)


def lasso_unit_eta(la: LassoAutomaton, m: Optional[LassoMupl] = None):
    """``(eta1, eta2)`` into ``lasso_mupl(la)``, checked to commute with all
    three transition maps and to preserve acceptance."""
    if m is None:
        m = lasso_mupl(la, max_classes=None)
    e1 = tuple(eta1_mask(la, m.table, x) for x in range(la.x1_count))
    e2 = tuple(eta2_mask(la, m.table, y) for y in range(la.x2_count))
    k = len(la.alphabet)
    acc = la.require_accepting()
    for y in range(la.x2_count):
        if (y in acc) != m.is_accepting(e2[y]):
            raise AssertionError(f"eta does not preserve acceptance at {y}")
        for a in range(k):
            if e2[la.delta3[y][a]] != m.step3(e2[y], a):
                raise AssertionError(f"eta2 does not commute with letter {a} at {y}")
    for x in range(la.x1_count):
        for a in range(k):
            if e1[la.delta1[x][a]] != m.step1(e1[x], a):
                raise AssertionError(f"eta1 does not commute with letter {a} at {x}")
            if e2[la.delta2[x][a]] != m.step2(e1[x], a):
                raise AssertionError(f"eta1/eta2 do not commute with letter {a} at {x}")
    return e1, e2


def lasso_subset_minimal(m: LassoSubsetAutomaton, materialize_limit: int = 8) -> bool:
    """Is bisimilarity on the two-sorted subset automaton discrete?

    Small instances are materialised and refined.  Otherwise, since every
    transition is an inverse image and acceptance is membership of the
    epsilon class, the language maps of both sorts are Boolean algebra maps;
    they are injective iff no atom has empty language.  The atom of a lasso
    class is probed with the reversed rotation of its representative, the
    atom of a word class with the reversal of its representative.
    """
    n1, n2 = m.lasso_class_count, m.word_class_count
    if max(n1, n2) <= materialize_limit:
        p1, p2 = lasso_bisimilarity(m.as_automaton())
        return p1.is_discrete() and p2.is_discrete()
    t = m.table
    words_ok = all(
        m.word_accepts(1 << q, tuple(reversed(u))) for q, u in enumerate(t.word_part.representative)
    )
    return words_ok and all(m.accepts(1 << p, l.reversed_rotation()) for p, l in enumerate(t.lasso_rep))


@dataclass(frozen=True)
class Derivatives:
    """Letter derivatives of the accepted lasso language, as automata."""

    automaton: LassoAutomaton

    def spoke(self, a: int) -> LassoAutomaton:
        """``{(u, v) | (a u, v) in L}``."""
        la = self.automaton
        return la.with_initial(la.delta1[la.require_initial()][a])

    def loop(self, a: int) -> AcceptingDfa:
        """``{u | (ε, a u) in L}`` as the second sort started after ``a``."""
        la = self.automaton
        return la.loop_dfa().with_initial(la.delta2[la.require_initial()][a])

    @staticmethod
    def word(d: AcceptingDfa, a: int) -> AcceptingDfa:
        """``{u | a u in K}`` for the word language ``K`` of ``d``."""
        if d.initial is None:
            raise ContractViolation("word derivative needs an initial state")
        return d.with_initial(d.dfa.delta[d.initial][a])


def final_coalgebra_derivatives(la: LassoAutomaton) -> Derivatives:
    la.require_initial()
    la.require_accepting()
    return Derivatives(la)
