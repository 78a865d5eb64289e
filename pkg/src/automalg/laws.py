"""Executable law checks.

Every check returns a :class:`LawResult`; suites bundle the checks that apply
to one automaton.  The command line ``laws`` subcommand and the acceptance
tests both run these.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable

from . import oracle
from .core import (
    AcceptingDfa,
    LawResult,
    bisimilarity_partition,
    quotient,
    PointedDfa,
    is_morphism,
    isomorphic,
    languages_agree_upto,
    product_pointed,
    reachable_part,
    terminal_pointed,
    unique_morphism,
)
from .equations import (
    embed_cofree_check,
    free,
    mupl,
    mupl_minimality,
    nuc,
    preformation_closure_check,
    reverse,
    sample_masks,
    unit_eta,
)
from .lasso import (
    Lasso,
    run_lasso,
    LassoAutomaton,
    eq_set,
    lasso_counit,
    lasso_isomorphic,
    lasso_machine,
    lasso_minimal,
    lasso_mupl,
    lasso_nuc,
    lasso_reachable_part,
    lasso_subset_minimal,
    lasso_transition,
    lasso_unit_eta,
    lasso_unique_morphism,
    lasso_is_morphism,
)
from .monoid import (
    CongruenceRep,
    congruence_leq,
    counit,
    m_with_acceptance,
    machine,
    t_with_acceptance,
    transition_monoid,
)
from .omega import (
    gamma_equivalent,
    meet_preservation_witness,
    saturation_partition,
    wilke_laws,
    wilke_monotone_witness,
    wilke_of,
)


def _guarded(name, fn) -> LawResult:
    try:
        out = fn()
    except AssertionError as exc:
        return LawResult(name, False, str(exc) or "assertion failed")
    if isinstance(out, LawResult):
        return out
    if out is True or out is None:
        return LawResult(name, True)
    return LawResult(name, False, None if out is False else str(out))


# ---------------------------------------------------------------- DFA laws


def law_unit(c: CongruenceRep) -> LawResult:
    back = transition_monoid(machine(c))
    ok = back.tables() == c.tables()
    return LawResult("unit", ok, None if ok else f"{back.class_count} vs {c.class_count} classes")


def law_counit(p: PointedDfa) -> LawResult:
    return _guarded("counit", lambda: counit(p) is not None)


def law_language_preservation(a: AcceptingDfa) -> LawResult:
    b = m_with_acceptance(t_with_acceptance(a))
    bound = 2 * a.dfa.state_count
    w = languages_agree_upto(a, a.initial, b, b.initial, bound)
    return LawResult("language-preservation", w is None, None if w is None else a.alphabet.format(w))


def all_morphisms(src: PointedDfa, dst: PointedDfa) -> list:
    """Every pointed morphism, by backtracking over state maps in index order
    (no propagation along transitions)."""
    n, m = src.dfa.state_count, dst.dfa.state_count
    k = len(src.alphabet)
    found = []
    f: list = [None] * n

    def consistent(s):
        # transitions into or out of s whose other end is already assigned
        for t in range(s + 1):
            for a in range(k):
                u = src.dfa.delta[t][a]
                if (t == s or u == s) and u <= s and f[u] != dst.dfa.delta[f[t]][a]:
                    return False
        return True

    def extend(s):
        if s == n:
            found.append(tuple(f))
            return
        choices = [dst.initial] if s == src.initial else range(m)
        for y in choices:
            f[s] = y
            if consistent(s):
                extend(s + 1)
        f[s] = None

    extend(0)
    return [g for g in found if is_morphism(src, dst, g)]


EXHAUSTIVE_LIMIT = 8


def law_thinness(src: PointedDfa, dst: PointedDfa) -> LawResult:
    """Exhaustive search finds at most one morphism, the one propagated by
    :func:`unique_morphism`, and it is onto the reachable part of ``dst``."""
    if src.dfa.state_count > EXHAUSTIVE_LIMIT:
        return LawResult("thinness", True, "skipped: source too large for exhaustive search")
    found = all_morphisms(src, dst)
    um = unique_morphism(src, dst)
    ok = len(found) <= 1 and (found[0] if found else None) == um
    if ok and um is not None:
        image = set(um)
        reach = set(reachable_part(dst)[1])
        ok = image == reach
    return LawResult("thinness", ok, None if ok else f"{len(found)} morphisms, unique_morphism={um}")


def law_monotonicity(src: PointedDfa, dst: PointedDfa) -> LawResult:
    if unique_morphism(src, dst) is None:
        return LawResult("monotonicity", True)
    ok = congruence_leq(transition_monoid(src), transition_monoid(dst))
    return LawResult("monotonicity", ok)


def law_nuc_idempotent(p: PointedDfa) -> LawResult:
    once = nuc(p)
    twice = nuc(once)
    there, back = unique_morphism(twice, once), unique_morphism(once, twice)
    ok = there is not None and back is not None
    if ok:
        ok = all(back[there[s]] == s for s in range(twice.dfa.state_count))
    return LawResult("nuc-idempotent", ok)


def law_free_product(d) -> LawResult:
    parts = [nuc(PointedDfa(d, x)) for x in d.states]
    prod, _ = product_pointed(parts, d.alphabet)
    ok = isomorphic(free(d), prod)
    return LawResult("free-is-product", ok)


def law_mupl_minimal(m) -> LawResult:
    return LawResult("mupl-minimal", mupl_minimality(m))


def law_preformation(m) -> LawResult:
    return LawResult("preformation", preformation_closure_check(m))


def law_language_of_subsets(m, maxlen: int = 8, max_words: int = 4000) -> LawResult:
    """Running the subset automaton from U accepts u iff [u^r] is in U.

    Words are visited level by level (at most ``max_words`` of them) and
    each run extends its prefix's run by one transition.
    """
    t = m.table
    k = len(t.alphabet)
    masks = sample_masks(t.class_count, 3, seed=1)
    level = [((), list(masks))]
    seen = 0
    for n in range(maxlen + 1):
        nxt = []
        for u, states in level:
            q = t.class_of(reverse(u))
            for U, S in zip(masks, states):
                if m.is_accepting(S) != bool(U >> q & 1):
                    return LawResult("subset-languages", False, t.alphabet.format(u))
            seen += 1
            if seen >= max_words:
                return LawResult("subset-languages", True)
            if n < maxlen and seen + len(nxt) < max_words:
                nxt.extend((u + (a,), [m.step(S, a) for S in states]) for a in range(k))
        level = nxt
    return LawResult("subset-languages", True)


def law_eta(a: AcceptingDfa, m) -> LawResult:
    return _guarded("eta-morphism", lambda: unit_eta(a, m) is not None)


def law_embed_cofree(a: AcceptingDfa, m) -> LawResult:
    r = embed_cofree_check(a, m)
    if r == "hypothesis-failed":
        return LawResult("embed-cofree", True, "hypothesis does not hold")
    return LawResult("embed-cofree", bool(r))


def law_mupl_stable(a: AcceptingDfa, m, limit: int = 6) -> LawResult:
    """Applying mupl to mupl(a) changes nothing (up to isomorphism)."""
    if m.class_count > limit:
        return LawResult("mupl-stable", True, "skipped: too many classes")
    inner = m.as_accepting()
    again = mupl(inner, max_classes=None)
    if again.class_count != m.class_count:
        return LawResult("mupl-stable", False, f"{again.class_count} vs {m.class_count} classes")
    eta = unit_eta(inner, again)
    ok = len(set(eta)) == len(eta)
    return LawResult("mupl-stable", ok)


def dfa_suite(a: AcceptingDfa, thin_targets: Iterable[PointedDfa] = ()) -> list:
    """All one-sorted laws for a pointed accepting automaton."""
    if a.initial is None:
        a = a.with_initial(0)
    p = a.pointed()
    results = []
    c = transition_monoid(p)
    results.append(law_unit(c))
    results.append(law_counit(p))
    r, mapping = reachable_part(p)
    ra = AcceptingDfa(r.dfa, frozenset(mapping[s] for s in a.accepting if s in mapping), 0)
    results.append(law_language_preservation(ra))
    results.append(law_thinness(machine(c), r))
    results.append(law_thinness(r, terminal_pointed(a.alphabet)))
    results.append(law_thinness(r, r))
    minimal = quotient(ra, bisimilarity_partition(ra)).pointed()
    results.append(law_thinness(r, minimal))
    results.append(law_monotonicity(r, minimal))
    for tgt in thin_targets:
        results.append(law_thinness(r, tgt))
        results.append(law_monotonicity(r, tgt))
    results.append(law_nuc_idempotent(p))
    results.append(law_free_product(a.dfa))
    m = mupl(a, max_classes=None)
    results.append(law_mupl_minimal(m))
    results.append(law_preformation(m))
    results.append(law_language_of_subsets(m))
    results.append(law_eta(a, m))
    results.append(law_embed_cofree(a, m))
    results.append(law_mupl_stable(a, m))
    return results


# -------------------------------------------------------------- lasso laws


def law_lasso_unit(la: LassoAutomaton) -> LawResult:
    c = lasso_transition(la)
    back = lasso_transition(lasso_machine(c))
    return LawResult("lasso-unit", back.tables() == c.tables())


def law_lasso_counit(la: LassoAutomaton) -> LawResult:
    return _guarded("lasso-counit", lambda: lasso_counit(la) is not None)


def law_t_equals_eq(la: LassoAutomaton) -> LawResult:
    r, _, _ = lasso_reachable_part(la)
    return LawResult("T=Eq", lasso_transition(la).tables() == eq_set(r).tables())


def law_nuc_of_minimal(la: LassoAutomaton) -> LawResult:
    m = lasso_minimal(la)
    n = lasso_nuc(m, m.accepting)
    ok = lasso_isomorphic(n, m)
    return LawResult(
        "nuc(<L>)=<L>", ok,
        None if ok else f"nuc has {n.x1_count}+{n.x2_count} states, minimal {m.x1_count}+{m.x2_count}",
    )


def law_lasso_mupl_minimal(la: LassoAutomaton) -> LawResult:
    m = lasso_mupl(la, max_classes=None)
    return LawResult("lasso-mupl-minimal", lasso_subset_minimal(m))


def law_lasso_eta(la: LassoAutomaton) -> LawResult:
    return _guarded("lasso-eta-morphism", lambda: lasso_unit_eta(la) is not None)


def law_lasso_brute_classes(la: LassoAutomaton, bound: int = 3) -> LawResult:
    """Lasso and word classes agree with direct classification of bounded words."""
    r, _, _ = lasso_reachable_part(la)
    c = eq_set(r)
    k = len(r.alphabet)
    groups = oracle.lasso_classes(r.delta1, r.delta2, r.delta3, k, bound, bound)
    for members in groups.values():
        ids = {c.class_of(Lasso(u, v)) for u, v in members}
        if len(ids) != 1:
            return LawResult("lasso-brute-classes", False, f"split group {members[:2]}")
    seen: dict = {}
    for beh, members in groups.items():
        cid = c.class_of(Lasso(*members[0]))
        if seen.setdefault(cid, beh) != beh:
            return LawResult("lasso-brute-classes", False, f"merged class {cid}")
    for members in oracle.word_classes(r.delta1, k, bound).values():
        if len({c.word_part.class_of(w) for w in members}) != 1:
            return LawResult("lasso-brute-classes", False, f"word group {members[:2]}")
    return LawResult("lasso-brute-classes", True)


def lasso_suite(la: LassoAutomaton) -> list:
    if la.initial is None:
        la = la.with_initial(0)
    out = [
        law_lasso_unit(la),
        law_lasso_counit(la),
        law_t_equals_eq(la),
        law_lasso_brute_classes(la),
    ]
    if la.accepting is not None:
        out += [law_nuc_of_minimal(la), law_lasso_mupl_minimal(la), law_lasso_eta(la)]
    return out


# -------------------------------------------------------------- omega laws


def law_saturation_brute(la: LassoAutomaton, pairs) -> LawResult:
    r, _, _ = lasso_reachable_part(la)
    e = saturation_partition(r).base
    brute = oracle.brute_gamma_closure(r.delta1, r.delta2, r.delta3, pairs)
    ok = e.class_of == type(e)(brute).class_of
    return LawResult("saturation-vs-brute", ok, None if ok else f"{e.class_of} vs {brute}")


def law_generator_soundness(la: LassoAutomaton) -> LawResult:
    r, _, _ = lasso_reachable_part(la)
    for con in saturation_partition(r).constraint_pairs:
        if not gamma_equivalent(con.lasso_left, con.lasso_right):
            return LawResult("generator-soundness", False, con.rule)
        if run_lasso(r, con.start, con.lasso_left) != con.left or run_lasso(r, con.start, con.lasso_right) != con.right:
            return LawResult("generator-soundness", False, f"{con.rule} witness does not replay")
    return LawResult("generator-soundness", True)


def law_wilke(la: LassoAutomaton) -> list:
    r, _, _ = lasso_reachable_part(la)
    return [LawResult(f"wilke-{x.name}", x.ok, x.witness) for x in wilke_laws(r)]


def law_wilke_remark(la: LassoAutomaton) -> LawResult:
    """With discrete E the up classes are exactly the lasso classes."""
    r, _, _ = lasso_reachable_part(la)
    w = wilke_of(r)
    if not w.partition.base.is_discrete():
        return LawResult("wilke-discrete-E", True, "E not discrete")
    return LawResult("wilke-discrete-E", w.up_count == eq_set(r).lasso_count)


def law_morphism_admissibility(src: LassoAutomaton, dst: LassoAutomaton) -> LawResult:
    rs, _, _ = lasso_reachable_part(src)
    rd, _, _ = lasso_reachable_part(dst)
    f = lasso_unique_morphism(rs, rd)
    if f is None:
        return LawResult("morphism-admissibility", True, "no morphism")
    bad = wilke_monotone_witness(rs, rd, f)
    return LawResult("morphism-admissibility", bad is None, None if bad is None else str(bad))


def _show(alphabet, x) -> str:
    return x.format(alphabet) if isinstance(x, Lasso) else alphabet.format(x)


def law_meet(las) -> LawResult:
    w = meet_preservation_witness(las)
    if w is None:
        return LawResult("meet-preservation", True)
    label, (left, right) = w
    al = las[0].alphabet
    return LawResult("meet-preservation", False, f"{label}: {_show(al, left)} vs {_show(al, right)}")


def omega_suite(la: LassoAutomaton) -> list:
    if la.initial is None:
        la = la.with_initial(0)
    out = [law_generator_soundness(la), law_wilke_remark(la)]
    out += law_wilke(la)
    out.append(law_meet([la, la]))
    quotient = lasso_nuc(la)
    out.append(law_morphism_admissibility(quotient, la))
    return out


def lasso_thinness(src: LassoAutomaton, dst: LassoAutomaton) -> LawResult:
    """At most one morphism between reachable pointed lasso automata, found by
    exhaustive enumeration of state-map pairs."""
    found = []
    for f1 in product(range(dst.x1_count), repeat=src.x1_count):
        for f2 in product(range(dst.x2_count), repeat=src.x2_count):
            if lasso_is_morphism(src, dst, f1, f2):
                found.append((f1, f2))
    um = lasso_unique_morphism(src, dst)
    ok = len(found) <= 1 and (found[0] if found else None) == um
    return LawResult("lasso-thinness", ok, None if ok else f"{len(found)} morphisms")


def report(results) -> list:
    """JSON-ready records ``{check, status, witness?}``."""
    out = []
    for r in results:
        rec = {"check": r.name, "status": "pass" if r.ok else "fail"}
        if r.witness is not None:
            rec["witness"] = r.witness
        out.append(rec)
    return out
