"""Ultimately periodic words, admissible accepting sets and Wilke congruences.

γ-equivalence of lassos is generated by three rules: unfold
``(u, v) ~ (u v, v)``, pump ``(u, v) ~ (u, v^k)`` and rotate
``(u, a v) ~ (u a, v a)``.  Pushing those rules through the finite
semigroup of a lasso automaton yields an equivalence ``E`` on X2 whose
unions are exactly the admissible accepting sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Optional, Sequence

from .core import (
    EPSILON,
    Alphabet,
    AlphabetMismatch,
    LawResult,
    Partition,
    SizeGuardError,
)
from .lasso import (
    Lasso,
    LassoAutomaton,
    lasso_reachable_part,
    run_lasso,
)
from .monoid import CongruenceRep, function_closure, kernel_congruence


def letter_at(l: Lasso, i: int) -> int:
    """The i-th letter of ``u v^ω``."""
    if i < len(l.spoke):
        return l.spoke[i]
    return l.loop[(i - len(l.spoke)) % len(l.loop)]


def gamma_bound(l1: Lasso, l2: Lasso) -> int:
    return max(len(l1.spoke), len(l2.spoke)) + lcm(len(l1.loop), len(l2.loop))


def prefix(l: Lasso, n: int) -> tuple:
    """First ``n`` letters of ``u v^ω``."""
    reps = max(0, -(-(n - len(l.spoke)) // len(l.loop)))
    return (l.spoke + l.loop * reps)[:n]


def gamma_equivalent(l1: Lasso, l2: Lasso) -> bool:
    """Do the lassos denote the same infinite word?

    Past both spokes the two words are periodic with a common period
    ``lcm``, so agreement on that many further letters settles it.
    """
    n = gamma_bound(l1, l2)
    return prefix(l1, n) == prefix(l2, n)


@dataclass(frozen=True)
class Triple:
    """Behaviour of a nonempty word: ``f`` on X1, ``g: X1 -> X2`` (first
    letter through delta2) and ``h`` on X2."""

    f: tuple
    g: tuple
    h: tuple

    def __mul__(self, other: "Triple") -> "Triple":
        return Triple(
            tuple(other.f[x] for x in self.f),
            tuple(other.h[y] for y in self.g),
            tuple(other.h[y] for y in self.h),
        )


@dataclass(frozen=True)
class PlusSemigroup:
    """Finite semigroup of behaviour triples with shortlex representatives."""

    triples: tuple
    words: tuple
    generators: tuple  # letter -> class
    mul: tuple  # mul[s][t] = class of rep(s) rep(t)

    @property
    def size(self) -> int:
        return len(self.triples)

    def class_of(self, w: Sequence[int]) -> int:
        if not w:
            raise ValueError("plus classes are for nonempty words")
        s = self.generators[w[0]]
        for a in w[1:]:
            s = self.mul[s][self.generators[a]]
        return s

    def power(self, s: int, n: int) -> int:
        t = s
        for _ in range(n - 1):
            t = self.mul[t][s]
        return t

    def powers(self, s: int) -> list:
        """Distinct classes among s, s^2, s^3, ... (a finite cycle)."""
        out = [s]
        seen = {s}
        t = self.mul[s][s]
        while t not in seen:
            seen.add(t)
            out.append(t)
            t = self.mul[t][s]
        return out


def letter_triple(la: LassoAutomaton, a: int) -> Triple:
    return Triple(
        tuple(la.delta1[x][a] for x in range(la.x1_count)),
        tuple(la.delta2[x][a] for x in range(la.x1_count)),
        tuple(la.delta3[y][a] for y in range(la.x2_count)),
    )


def plus_semigroup(la: LassoAutomaton) -> PlusSemigroup:
    k = len(la.alphabet)
    gens = [letter_triple(la, a) for a in range(k)]
    index: dict = {}
    triples: list = []
    words: list = []
    for a, t in enumerate(gens):
        if t not in index:
            index[t] = len(triples)
            triples.append(t)
            words.append((a,))
    i = 0
    while i < len(triples):
        for a in range(k):
            t = triples[i] * gens[a]
            if t not in index:
                index[t] = len(triples)
                triples.append(t)
                words.append(words[i] + (a,))
        i += 1
    mul = tuple(tuple(index[s * t] for t in triples) for s in triples)
    return PlusSemigroup(tuple(triples), tuple(words), tuple(index[g] for g in gens), mul)


@dataclass(frozen=True)
class Constraint:
    """Two X2 states forced together, with the lassos and start that witness it."""

    rule: str
    left: int
    right: int
    start: int
    lasso_left: Lasso
    lasso_right: Lasso


@dataclass(frozen=True)
class AdmissibilityPartition:
    base: Partition
    constraint_pairs: tuple

    def is_admissible(self, c) -> bool:
        c = frozenset(c)
        return all((y in c) == (z in c) for y, z in self._edges())

    def _edges(self):
        for cls in self.base.classes():
            for y in cls[1:]:
                yield cls[0], y

    def crossing_witness(self, c) -> Optional[Constraint]:
        c = frozenset(c)
        for con in self.constraint_pairs:
            if (con.left in c) != (con.right in c):
                return con
        return None


def constraint_pairs(la: LassoAutomaton, semi: Optional[PlusSemigroup] = None) -> list:
    """Generating pairs of E in canonical order: rule, then start state, then
    semigroup classes, then letters."""
    if semi is None:
        semi = plus_semigroup(la)
    k = len(la.alphabet)
    out = []
    n1 = la.x1_count
    for x in range(n1):
        for s, t in enumerate(semi.triples):
            v = semi.words[s]
            out.append(Constraint("unfold", t.g[x], t.g[t.f[x]], x, Lasso(EPSILON, v), Lasso(v, v)))
    for x in range(n1):
        for s, t in enumerate(semi.triples):
            v = semi.words[s]
            for n, p in enumerate(semi.powers(s)[1:], start=2):
                out.append(
                    Constraint("pump", t.g[x], semi.triples[p].g[x], x, Lasso(EPSILON, v), Lasso(EPSILON, v * n))
                )
    for x in range(n1):
        for a in range(k):
            # v' empty: (u, a) ~ (u a, a) is an unfold, already present
            for s, t in enumerate(semi.triples):
                v = semi.words[s]
                left = t.h[la.delta2[x][a]]
                right = la.delta3[t.g[la.delta1[x][a]]][a]
                out.append(Constraint("rotate", left, right, x, Lasso(EPSILON, (a,) + v), Lasso((a,), v + (a,))))
    return out


def saturation_partition(la: LassoAutomaton) -> AdmissibilityPartition:
    """The equivalence E on X2 generated by the γ rules from every X1 state.

    Intended for reachable automata, where every X1 state is a legitimate
    starting point.
    """
    pairs = constraint_pairs(la)
    part = Partition.from_pairs(la.x2_count, ((c.left, c.right) for c in pairs))
    return AdmissibilityPartition(part, tuple(c for c in pairs if c.left != c.right))


def admissible_sets(la: LassoAutomaton, max_classes: Optional[int] = 20) -> list:
    """All unions of E-classes, in binary-counter order over class ids."""
    e = saturation_partition(la).base
    m = e.class_count
    if max_classes is not None and m > max_classes:
        raise SizeGuardError(f"{m} E-classes exceeds the bound of {max_classes}")
    classes = e.classes()
    out = []
    for mask in range(1 << m):
        out.append(frozenset(y for i in range(m) if mask >> i & 1 for y in classes[i]))
    return out


def is_saturated(la: LassoAutomaton) -> bool:
    return saturation_witness(la) is None


def saturation_witness(la: LassoAutomaton) -> Optional[Constraint]:
    """A γ-equivalent pair separated by the accepting set, or None."""
    return saturation_partition(la).crossing_witness(la.require_accepting())


def up_equivalent(la: LassoAutomaton, l1: Lasso, l2: Lasso, part: Optional[AdmissibilityPartition] = None) -> bool:
    e = (part or saturation_partition(la)).base
    return all(e.same(run_lasso(la, x, l1), run_lasso(la, x, l2)) for x in range(la.x1_count))


@dataclass(frozen=True)
class WilkeCongruenceRep:
    """Transition Wilke congruence of a reachable pointed lasso automaton.

    ``up_table[q][s]`` is the up class of lassos whose spoke lies in word
    class ``q`` and whose loop lies in plus class ``s``.
    """

    alphabet: Alphabet
    word_part: CongruenceRep
    plus: PlusSemigroup
    up_count: int
    up_rep: tuple  # Lasso per up class
    up_table: tuple
    omega_map: tuple  # plus class -> up class of (ε, v)
    mixed_action: tuple  # mixed_action[s][p] = up class of (v_s u, w)
    partition: AdmissibilityPartition

    def up_class(self, l: Lasso) -> int:
        return self.up_table[self.word_part.class_of(l.spoke)][self.plus.class_of(l.loop)]


def wilke_transition(la: LassoAutomaton) -> WilkeCongruenceRep:
    r, _, _ = lasso_reachable_part(la)
    return wilke_of(r)


def wilke_of(la: LassoAutomaton) -> WilkeCongruenceRep:
    """Wilke congruence computed over all X1 states of ``la`` as given."""
    semi = plus_semigroup(la)
    adm = saturation_partition(la)
    e = adm.base
    word_dfa = la.word_dfa()
    word_part = kernel_congruence(word_dfa)
    funcs, _, _ = function_closure(word_dfa)
    n1 = la.x1_count

    best: dict = {}
    raw = []
    for f, u in zip(funcs, word_part.representative):
        row = []
        for t, v in zip(semi.triples, semi.words):
            key = tuple(e.class_of[t.g[f[x]]] for x in range(n1))
            cand = Lasso(u, v)
            cur = best.get(key)
            if cur is None or cand.key() < cur.key():
                best[key] = cand
            row.append(key)
        raw.append(row)
    order = sorted(best, key=lambda key: best[key].key())
    index = {key: i for i, key in enumerate(order)}
    up_table = tuple(tuple(index[key] for key in row) for row in raw)
    omega = tuple(up_table[word_part.eps_class][s] for s in range(semi.size))
    reps = tuple(best[key] for key in order)
    mixed = tuple(
        tuple(
            up_table[word_part.class_of(semi.words[s] + reps[p].spoke)][semi.class_of(reps[p].loop)]
            for p in range(len(order))
        )
        for s in range(semi.size)
    )
    return WilkeCongruenceRep(la.alphabet, word_part, semi, len(order), reps, up_table, omega, mixed, adm)


def wilke_laws(la: LassoAutomaton, w: Optional[WilkeCongruenceRep] = None) -> list:
    """Check the Wilke algebra laws on ``wilke_of(la)``.

    Each law is tested against direct runs of ``la`` where the law concerns
    well-definedness, and on the class tables for the algebraic identities.
    """
    if w is None:
        w = wilke_of(la)
    semi = w.plus
    e = w.partition.base
    n1 = la.x1_count
    results = []

    def fail(name, msg):
        results.append(LawResult(name, False, msg))

    def up_by_run(l: Lasso) -> tuple:
        return tuple(e.class_of[run_lasso(la, x, l)] for x in range(n1))

    up_key = {p: up_by_run(l) for p, l in enumerate(w.up_rep)}

    # associativity and compatibility with concatenation of representatives
    bad = None
    for s in range(semi.size):
        for t in range(semi.size):
            if semi.class_of(semi.words[s] + semi.words[t]) != semi.mul[s][t]:
                bad = bad or f"rep({s})·rep({t})"
            for r in range(semi.size):
                if semi.mul[semi.mul[s][t]][r] != semi.mul[s][semi.mul[t][r]]:
                    bad = bad or f"({s}·{t})·{r}"
    results.append(LawResult("product", bad is None, bad))

    # ω-power: every word of a plus class gives the same up class
    bad = None
    for s, v in enumerate(semi.words):
        if up_by_run(Lasso(EPSILON, v)) != up_key[w.omega_map[s]]:
            bad = f"(ε,{w.alphabet.format(v)})"
            break
        # a second word of the same class, if the class has a longer member
        for t in range(semi.size):
            vv = v + semi.words[t]
            if semi.class_of(vv) == s and up_by_run(Lasso(EPSILON, vv)) != up_key[w.omega_map[s]]:
                bad = f"(ε,{w.alphabet.format(vv)})"
    results.append(LawResult("omega", bad is None, bad))

    # mixed product: independent of the representative of the up class
    bad = None
    for s, v in enumerate(semi.words):
        for q, u in enumerate(w.word_part.representative):
            for t, z in enumerate(semi.words):
                l = Lasso(u, z)
                p = w.up_table[q][t]
                got = up_by_run(Lasso(v + u, z))
                if got != up_key[w.mixed_action[s][p]]:
                    bad = bad or f"{w.alphabet.format(v)}·{l.format(w.alphabet)}"
    results.append(LawResult("mixed", bad is None, bad))

    bad = None
    for s in range(semi.size):
        for t in range(semi.size):
            for p in range(w.up_count):
                if w.mixed_action[semi.mul[s][t]][p] != w.mixed_action[s][w.mixed_action[t][p]]:
                    bad = bad or f"mixed associativity at {s},{t},{p}"
    results.append(LawResult("mixed-associativity", bad is None, bad))

    bad = None
    for s in range(semi.size):
        for n in range(1, semi.size + 2):
            if w.omega_map[semi.power(s, n)] != w.omega_map[s]:
                bad = bad or f"{w.alphabet.format(semi.words[s])}^{n}"
    results.append(LawResult("pumping", bad is None, bad))

    bad = None
    for s in range(semi.size):
        for t in range(semi.size):
            if w.mixed_action[s][w.omega_map[semi.mul[t][s]]] != w.omega_map[semi.mul[s][t]]:
                bad = bad or f"s={w.alphabet.format(semi.words[s])}, t={w.alphabet.format(semi.words[t])}"
    results.append(LawResult("rotation", bad is None, bad))
    return results


def reachable_meet(las: Sequence[LassoAutomaton], alphabet: Optional[Alphabet] = None):
    """Reachable part of the two-sorted product, pointed at the tuple of
    initial states.  Returns ``(automaton, x1_tuples, x2_tuples)``."""
    las = list(las)
    if not las:
        if alphabet is None:
            raise ValueError("the empty meet needs an explicit alphabet")
        k = len(alphabet)
        one = LassoAutomaton(alphabet, 1, 1, ((0,) * k,), ((0,) * k,), ((0,) * k,), 0)
        return one, [()], [()]
    alpha = las[0].alphabet
    if alphabet is not None and alphabet != alpha:
        raise AlphabetMismatch("alphabet argument disagrees with the automata")
    if any(la.alphabet != alpha for la in las):
        raise AlphabetMismatch("meet components must share an alphabet")
    k = len(alpha)
    start = tuple(la.require_initial() for la in las)
    i1 = {start: 0}
    t1 = [start]
    i = 0
    while i < len(t1):
        for a in range(k):
            nxt = tuple(la.delta1[x][a] for la, x in zip(las, t1[i]))
            if nxt not in i1:
                i1[nxt] = len(t1)
                t1.append(nxt)
        i += 1
    i2: dict = {}
    t2: list = []
    for cur in t1:
        for a in range(k):
            nxt = tuple(la.delta2[x][a] for la, x in zip(las, cur))
            if nxt not in i2:
                i2[nxt] = len(t2)
                t2.append(nxt)
    i = 0
    while i < len(t2):
        for a in range(k):
            nxt = tuple(la.delta3[y][a] for la, y in zip(las, t2[i]))
            if nxt not in i2:
                i2[nxt] = len(t2)
                t2.append(nxt)
        i += 1
    d1 = tuple(tuple(i1[tuple(la.delta1[x][a] for la, x in zip(las, cur))] for a in range(k)) for cur in t1)
    d2 = tuple(tuple(i2[tuple(la.delta2[x][a] for la, x in zip(las, cur))] for a in range(k)) for cur in t1)
    d3 = tuple(tuple(i2[tuple(la.delta3[y][a] for la, y in zip(las, cur))] for a in range(k)) for cur in t2)
    return LassoAutomaton(alpha, len(t1), len(t2), d1, d2, d3, 0), t1, t2


def _joint_classes(ws: Sequence[WilkeCongruenceRep]):
    """Tuples of (word class, plus class, up class) reached jointly by all
    words and lassos, with witnesses."""
    k = len(ws[0].alphabet)
    start = tuple(w.word_part.eps_class for w in ws)
    words = {start: EPSILON}
    queue = [start]
    i = 0
    while i < len(queue):
        cur = queue[i]
        for a in range(k):
            nxt = tuple(w.word_part.right_step[q][a] for w, q in zip(ws, cur))
            if nxt not in words:
                words[nxt] = words[cur] + (a,)
                queue.append(nxt)
        i += 1
    plus: dict = {}
    queue = []
    for a in range(k):
        nxt = tuple(w.plus.generators[a] for w in ws)
        if nxt not in plus:
            plus[nxt] = (a,)
            queue.append(nxt)
    i = 0
    while i < len(queue):
        cur = queue[i]
        for a in range(k):
            nxt = tuple(w.plus.mul[s][w.plus.generators[a]] for w, s in zip(ws, cur))
            if nxt not in plus:
                plus[nxt] = plus[cur] + (a,)
                queue.append(nxt)
        i += 1
    ups: dict = {}
    for qs, u in words.items():
        for ss, v in plus.items():
            key = tuple(w.up_table[q][s] for w, q, s in zip(ws, qs, ss))
            ups.setdefault(key, Lasso(u, v))
    return words, plus, ups


def wilke_refinement_witness(finer: WilkeCongruenceRep, coarser_parts: Sequence[WilkeCongruenceRep]):
    """``None`` if ``finer`` is contained in the intersection of the others,
    else a pair of words or lassos it identifies while the intersection
    separates them."""
    ws = [finer] + list(coarser_parts)
    words, plus, ups = _joint_classes(ws)
    for table in (words, plus, ups):
        seen: dict = {}
        for key, wit in table.items():
            prev = seen.setdefault(key[0], (key[1:], wit))
            if prev[0] != key[1:]:
                return prev[1], wit
    return None


def meet_preservation_witness(las: Sequence[LassoAutomaton]):
    """Compare the Wilke congruence of the reachable meet with the
    intersection of the components' congruences.  ``None`` when equal."""
    meet, _, _ = reachable_meet(las)
    wm = wilke_of(meet)
    parts = [wilke_transition(la) for la in las]
    bad = wilke_refinement_witness(wm, parts)
    if bad is not None:
        return ("meet finer than intersection fails", bad)
    # intersection contained in the meet's congruence
    words, plus, ups = _joint_classes(parts + [wm])
    for table in (words, plus, ups):
        seen: dict = {}
        for key, wit in table.items():
            prev = seen.setdefault(key[:-1], (key[-1], wit))
            if prev[0] != key[-1]:
                return ("intersection finer than meet fails", (prev[1], wit))
    return None


def meet_preservation_check(las: Sequence[LassoAutomaton]) -> bool:
    return meet_preservation_witness(las) is None


def wilke_monotone_witness(src: LassoAutomaton, dst: LassoAutomaton, morphism):
    """For a morphism ``src -> dst`` of reachable automata: the Wilke
    congruence of ``src`` must refine that of ``dst``, and preimages of
    admissible sets of ``dst`` must be admissible in ``src``."""
    ws, wd = wilke_of(src), wilke_of(dst)
    bad = wilke_refinement_witness(ws, [wd])
    if bad is not None:
        return ("refinement", bad)
    _, f2 = morphism
    e_src = saturation_partition(src)
    for c in admissible_sets(dst, max_classes=None):
        pre = frozenset(y for y in range(src.x2_count) if f2[y] in c)
        if not e_src.is_admissible(pre):
            return ("preimage", sorted(c))
    return None
