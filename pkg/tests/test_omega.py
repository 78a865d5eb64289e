import random

from hypothesis import given, settings

from automalg import oracle
from automalg.generate import random_lasso
from automalg.lasso import (
    Lasso,
    LassoAutomaton,
    eq_set,
    lasso_nuc,
    lasso_reachable_part,
    lasso_unique_morphism,
    lassos_upto,
    run_lasso,
)
from automalg.omega import (
    admissible_sets,
    gamma_equivalent,
    is_saturated,
    meet_preservation_witness,
    reachable_meet,
    saturation_partition,
    saturation_witness,
    up_equivalent,
    wilke_laws,
    wilke_monotone_witness,
    wilke_of,
)

from conftest import AB, lasso_automata

PAIRS3 = oracle.brute_gamma_pairs(2, 3, 3)


def test_gamma_small_cases():
    p = lambda s: Lasso.parse(AB, s)  # noqa: E731
    assert gamma_equivalent(p("a,ba"), p("ab,ab"))
    assert gamma_equivalent(p("ε,a"), p("aaa,aa"))
    assert gamma_equivalent(p("ε,ab"), p("ε,abab"))
    assert not gamma_equivalent(p("ε,ab"), p("ε,ba"))
    assert not gamma_equivalent(p("ε,aab"), p("ε,aba"))


def test_gamma_agrees_with_naive_bound_3():
    ls = list(lassos_upto(2, 3, 3))
    for l1 in ls:
        for l2 in ls:
            length = 4 * (max(len(l1.spoke), len(l2.spoke)) + len(l1.loop) * len(l2.loop))
            naive = oracle.naive_gamma((l1.spoke, l1.loop), (l2.spoke, l2.loop), length)
            assert gamma_equivalent(l1, l2) == naive


@settings(max_examples=60, deadline=None)
@given(lasso_automata())
def test_saturation_partition_agrees_with_brute_closure(la):
    r, _, _ = lasso_reachable_part(la)
    if len(r.alphabet) != 2:
        return
    e = saturation_partition(r).base
    brute = oracle.brute_gamma_closure(r.delta1, r.delta2, r.delta3, PAIRS3)
    for y in range(r.x2_count):
        for z in range(r.x2_count):
            assert e.same(y, z) == (brute[y] == brute[z])


@settings(max_examples=60, deadline=None)
@given(lasso_automata())
def test_constraint_witnesses_replay(la):
    r, _, _ = lasso_reachable_part(la)
    for con in saturation_partition(r).constraint_pairs:
        assert gamma_equivalent(con.lasso_left, con.lasso_right)
        assert run_lasso(r, con.start, con.lasso_left) == con.left
        assert run_lasso(r, con.start, con.lasso_right) == con.right


@settings(max_examples=60, deadline=None)
@given(lasso_automata(max_sort=2))
def test_admissible_sets_are_exactly_saturated_choices(la):
    r, _, _ = lasso_reachable_part(la)
    adm = set(admissible_sets(r, max_classes=None))
    n = r.x2_count
    for mask in range(1 << n):
        c = frozenset(y for y in range(n) if mask >> y & 1)
        assert (c in adm) == is_saturated(r.with_accepting(c))


@settings(max_examples=60, deadline=None)
@given(lasso_automata())
def test_wilke_laws_hold(la):
    r, _, _ = lasso_reachable_part(la)
    for res in wilke_laws(r):
        assert res.ok, (res.name, res.witness)


@settings(max_examples=40, deadline=None)
@given(lasso_automata())
def test_up_classes_agree_with_bounded_runs(la):
    r, _, _ = lasso_reachable_part(la)
    w = wilke_of(r)
    part = w.partition
    ls = list(lassos_upto(len(r.alphabet), 2, 2))
    for l1 in ls:
        for l2 in ls:
            assert (w.up_class(l1) == w.up_class(l2)) == up_equivalent(r, l1, l2, part)


def test_saturation_witness_loop_a(loop_a):
    # "loop starts with a" is not a language of infinite words
    w = saturation_witness(loop_a)
    assert w is not None and gamma_equivalent(w.lasso_left, w.lasso_right)


def test_preimages_of_admissible_sets():
    rng = random.Random(11)
    for _ in range(40):
        la = random_lasso(rng, 3, AB)
        r, _, _ = lasso_reachable_part(la)
        q = lasso_nuc(r)
        f = lasso_unique_morphism(q, r)
        assert f is not None
        assert wilke_monotone_witness(q, r, f) is None


def _brute_up_same(la, l1, l2, pairs):
    labels = oracle.brute_gamma_closure(la.delta1, la.delta2, la.delta3, pairs)
    b1 = oracle.lasso_behaviour(la.delta1, la.delta2, la.delta3, l1.spoke, l1.loop)
    b2 = oracle.lasso_behaviour(la.delta1, la.delta2, la.delta3, l2.spoke, l2.loop)
    return all(labels[y] == labels[z] for y, z in zip(b1, b2))


def test_meet_counterexample():
    """(ε,a) and (b,a) are identified by both components' Wilke congruences
    but separated in the meet, whose E is finer than the pulled-back ones."""
    A = LassoAutomaton(AB, 2, 2, ((0, 0), (0, 0)), ((1, 0), (0, 0)), ((0, 0), (1, 0)), 0)
    B = LassoAutomaton(AB, 2, 2, ((0, 1), (1, 0)), ((1, 0), (0, 1)), ((0, 0), (1, 0)), 0)
    l1, l2 = Lasso.parse(AB, "ε,a"), Lasso.parse(AB, "b,a")
    pairs = oracle.brute_gamma_pairs(2, 4, 4)
    assert _brute_up_same(A, l1, l2, pairs)
    assert _brute_up_same(B, l1, l2, pairs)
    meet, _, _ = reachable_meet([A, B])
    assert not _brute_up_same(meet, l1, l2, pairs)
    assert meet_preservation_witness([A, B]) is not None


def test_meet_with_itself_is_preserved():
    rng = random.Random(5)
    for _ in range(20):
        la = random_lasso(rng, 3, AB)
        assert meet_preservation_witness([la, la]) is None


def test_empty_meet_is_terminal():
    one, t1, t2 = reachable_meet([], AB)
    assert (one.x1_count, one.x2_count) == (1, 1) and t1 == [()]


def test_meet_tuples_follow_components():
    rng = random.Random(3)
    for _ in range(10):
        las = [random_lasso(rng, 3, AB) for _ in range(2)]
        meet, t1, t2 = reachable_meet(las)
        for u, v in oracle.all_lassos(2, 2, 2):
            y = run_lasso(meet, 0, Lasso(u, v))
            assert t2[y] == tuple(run_lasso(la, 0, Lasso(u, v)) for la in las)


def test_wilke_of_identity_like_automaton():
    # discrete E: up classes coincide with lasso classes
    la = LassoAutomaton(AB, 1, 1, ((0, 0),), ((0, 0),), ((0, 0),), 0)
    w = wilke_of(la)
    assert w.up_count == eq_set(la).lasso_count == 1


def test_pairs_are_unordered_and_distinct():
    for l, m in PAIRS3[:50]:
        assert l != m
    assert len(PAIRS3) == len({frozenset(p) for p in PAIRS3})
