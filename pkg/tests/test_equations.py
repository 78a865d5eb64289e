import pytest
from hypothesis import given, settings

from automalg import oracle
from automalg.core import (
    AcceptingDfa,
    Dfa,
    PointedDfa,
    SizeGuardError,
    isomorphic,
    product_pointed,
    run_word,
    unique_morphism,
)
from automalg.equations import (
    atom_decomposition,
    cofree,
    colorings,
    embed_cofree_check,
    free,
    members,
    mupl,
    mupl_minimality,
    nuc,
    powerset_lift,
    preformation_closure_check,
    reverse,
    unit_eta,
)

import languages as L
from conftest import AB, accepting_dfas

X, Y = 0, 1


def _lang_of(a: AcceptingDfa, start: int, maxlen: int = 8):
    return {AB.format(w).replace("ε", "") for w in oracle.all_words(2, maxlen)
            if run_word(a.dfa, start, w) in a.accepting}


def _matches(a, start, pred, maxlen=8):
    return all((run_word(a.dfa, start, w) in a.accepting) == pred(AB.format(w).replace("ε", ""))
               for w in oracle.all_words(2, maxlen))


def test_nuc_of_example(example):
    n = nuc(example.pointed(), example.accepting)
    assert n.dfa.state_count == 3
    # [ε], [a], [b]: every letter a leads to [a], every b to [b]
    assert n.dfa.delta == ((1, 2), (1, 2), (1, 2))
    assert n.accepting == frozenset({0, 2})


def test_powerset_lift_of_example(example):
    lift = powerset_lift(example)
    assert set(lift.states) == {frozenset({X}), frozenset(), frozenset({X, Y})}
    full = powerset_lift(example, full=True)
    assert len(full.states) == 4
    idx = full.index
    expected = {
        frozenset({X}): (frozenset(), frozenset({X, Y})),
        frozenset({Y}): (frozenset({X, Y}), frozenset()),
        frozenset(): (frozenset(), frozenset()),
        frozenset({X, Y}): (frozenset({X, Y}), frozenset({X, Y})),
    }
    for s, (ta, tb) in expected.items():
        assert full.delta_hat[idx(s)] == (idx(ta), idx(tb))


def test_nuc_of_lift(example):
    n = nuc(powerset_lift(example).as_pointed())
    assert n.dfa.state_count == 3
    assert n.dfa.delta[1] == (1, 1) and n.dfa.delta[2] == (2, 2)


def test_mupl_of_example(example):
    m = mupl(example)
    assert m.state_count == 8
    a = m.accepting_dfa()
    assert len(a.accepting) == 4 and all(m.is_accepting(s) for s in a.accepting)
    expected = {
        "{}": L.empty,
        "{[ε]}": L.only_eps,
        "{[a]}": L.ends_a,
        "{[b]}": L.ends_b,
        "{[ε],[a]}": L.eps_or_ends_a,
        "{[ε],[b]}": L.eps_or_ends_b,
        "{[a],[b]}": L.nonempty,
        "{[ε],[a],[b]}": L.everything,
    }
    assert sorted(m.label(s) for s in range(8)) == sorted(expected)
    for s in range(8):
        assert _matches(a, s, expected[m.label(s)])


def test_unit_into_mupl(example):
    m = mupl(example)
    eta = unit_eta(example, m)
    assert m.label(eta[X]) == "{[ε],[b]}" and m.label(eta[Y]) == "{[b]}"
    assert m.initial == eta[X]


def test_cofree_singleton(example):
    cf = cofree(example.dfa, "singleton")
    a = cf.automaton
    assert a.dfa.state_count == 4
    expected = {
        (X, frozenset({X})): L.eps_or_ends_b,
        (Y, frozenset({X})): L.ends_b,
        (X, frozenset({Y})): L.ends_a,
        (Y, frozenset({Y})): L.eps_or_ends_a,
    }
    for key, pred in expected.items():
        assert _matches(a, cf.language_state(*key), pred)


def test_cofree_all_colorings(example):
    cf = cofree(example.dfa, "all")
    # singleton languages plus ∅ and Σ*
    assert cf.automaton.dfa.state_count == 6


def test_atom_decomposition(example):
    m = mupl(example)
    q = m.table.class_of(())
    f = atom_decomposition(example, q, m=m).simplify()
    assert f.render(("x", "y")) == "L(x,{x}) ∩ L(y,{y})"
    for w in oracle.all_words(2, 8):
        assert f.evaluate(w) == (m.table.class_of(reverse(w)) == q)


def test_structure_checks_on_example(example):
    m = mupl(example)
    assert preformation_closure_check(m)
    assert mupl_minimality(m)
    assert embed_cofree_check(example, m) is True


def test_size_guard():
    # a 5-state cycle with a reset has a large transition monoid
    d = Dfa(5, AB, tuple(((s + 1) % 5, 0 if s == 4 else s) for s in range(5)))
    a = AcceptingDfa(d, frozenset({0}), 0)
    with pytest.raises(SizeGuardError):
        mupl(a, max_classes=3)


def test_colorings():
    assert colorings(2, "singleton") == [frozenset({0}), frozenset({1})]
    assert len(colorings(3, "all")) == 8
    with pytest.raises(ValueError):
        colorings(2, "odd")


@settings(max_examples=60, deadline=None)
@given(accepting_dfas())
def test_nuc_idempotent(a):
    once = nuc(a.pointed())
    twice = nuc(once)
    assert isomorphic(once, twice)


@settings(max_examples=40, deadline=None)
@given(accepting_dfas(max_states=3))
def test_free_is_product_of_nucs(a):
    parts = [nuc(PointedDfa(a.dfa, x)) for x in a.dfa.states]
    prod, _ = product_pointed(parts, a.alphabet)
    assert isomorphic(free(a.dfa), prod)


@settings(max_examples=60, deadline=None)
@given(accepting_dfas())
def test_free_is_nuc_when_reachable(a):
    # random_accepting returns reachable automata
    assert isomorphic(free(a.dfa), nuc(a.pointed()))


@settings(max_examples=60, deadline=None)
@given(accepting_dfas(max_states=4))
def test_mupl_laws(a):
    m = mupl(a, max_classes=None)
    eta = unit_eta(a, m)
    # the unit is a morphism into the materialised automaton
    ma = m.as_accepting(m.initial) if m.class_count <= 10 else None
    if ma is not None:
        assert unique_morphism(a.pointed(), ma.pointed()) == eta
    assert mupl_minimality(m)
    assert preformation_closure_check(m)
    assert embed_cofree_check(a, m) in (True, "hypothesis-failed")


@settings(max_examples=60, deadline=None)
@given(accepting_dfas(max_states=4))
def test_subset_languages_are_reversed_classes(a):
    m = mupl(a, max_classes=None)
    for U in (1, (1 << m.class_count) - 1, 1 << (m.class_count - 1)):
        for w in oracle.all_words(len(a.alphabet), 5):
            assert m.is_accepting(m.run(U, w)) == bool(U >> m.table.class_of(reverse(w)) & 1)


def test_members_low_bits():
    assert members(0b10110) == [1, 2, 4]
    assert members(0) == []
