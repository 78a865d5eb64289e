"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL summary; the lines are printed at
the end of the pytest run (see conftest) and by ``python tests/test_acceptance.py``.
Corpora are drawn from ``random.Random(0)``.
"""

import os
import random
import subprocess
import sys
import time
from collections import Counter

from automalg import oracle
from automalg.core import PointedDfa, isomorphic, product_pointed, run_word
from automalg.equations import (
    atom_decomposition,
    cofree,
    free,
    mupl,
    nuc,
    powerset_lift,
    reverse,
    unit_eta,
)
from automalg.generate import (
    all_accepting_dfas,
    all_dfas,
    all_lasso_automata,
    alphabet_of_size,
    random_accepting,
    random_lasso,
)
from automalg.io import load
from automalg.lasso import lasso_nuc, lasso_reachable_part, lasso_unique_morphism, lassos_upto, observable_quotient
from automalg.laws import (
    dfa_suite,
    lasso_suite,
    law_meet,
    law_nuc_of_minimal,
    law_morphism_admissibility,
    law_saturation_brute,
    law_wilke,
)
from automalg.omega import gamma_equivalent

import languages as L
from conftest import two_state_example

RESULTS: dict = {}
AB = alphabet_of_size(2)
DATA = os.path.join(os.path.dirname(__file__), "data")


def record(key, title, ok, detail, started):
    line = f"{key} {'PASS' if ok else 'FAIL'} {title}: {detail} [{time.perf_counter() - started:.1f}s]"
    RESULTS[key] = line
    return line


def tally(results, names=None):
    """Failures per law name, restricted to ``names`` when given."""
    fails, total = Counter(), Counter()
    for r in results:
        if names is not None and r.name not in names:
            continue
        total[r.name] += 1
        if not r.ok:
            fails[r.name] += 1
    return fails, total


def describe(fails, total):
    if not fails:
        return f"{sum(total.values())} checks over {len(total)} laws, all pass"
    return ", ".join(f"{n} failed {fails[n]}/{total[n]}" for n in sorted(fails))


# ------------------------------------------------------------------ AC1


def _lang_ok(a, start, pred, maxlen=8):
    return all((run_word(a.dfa, start, w) in a.accepting) == pred(AB.format(w).replace("ε", ""))
               for w in oracle.all_words(2, maxlen))


def golden_checks():
    ex = two_state_example()
    x, y = 0, 1
    out = {}
    n = nuc(ex.pointed(), ex.accepting)
    out["a nuc"] = n.dfa.state_count == 3 and n.dfa.delta == ((1, 2), (1, 2), (1, 2)) and n.accepting == {0, 2}

    full = powerset_lift(ex, full=True)
    fx, fy, e, xy = frozenset({x}), frozenset({y}), frozenset(), frozenset({x, y})
    drawn = {fx: (e, xy), fy: (xy, e), e: (e, e), xy: (xy, xy)}
    out["b lift"] = len(full.states) == 4 and all(
        full.delta_hat[full.index(s)] == (full.index(ta), full.index(tb)) for s, (ta, tb) in drawn.items()
    )

    nl = nuc(powerset_lift(ex).as_pointed())
    out["c nuc of lift"] = nl.dfa.state_count == 3 and nl.dfa.delta[1] == (1, 1) and nl.dfa.delta[2] == (2, 2)

    m = mupl(ex)
    ma = m.accepting_dfa()
    eps = m.table.class_of(())
    eta = unit_eta(ex, m)
    out["d mupl"] = (m.state_count == 8 and len(ma.accepting) == 4
                     and m.label(eta[x]) == "{[ε],[b]}" and m.label(eta[y]) == "{[b]}")

    by_label = {
        "{}": L.empty, "{[a]}": L.ends_a, "{[ε]}": L.only_eps, "{[b]}": L.ends_b,
        "{[ε],[a]}": L.eps_or_ends_a, "{[a],[b]}": L.nonempty, "{[ε],[b]}": L.eps_or_ends_b,
        "{[ε],[a],[b]}": L.everything,
    }
    out["e languages"] = sorted(m.label(s) for s in range(8)) == sorted(by_label) and all(
        _lang_ok(ma, s, by_label[m.label(s)]) for s in range(8)
    )

    cf = cofree(ex.dfa, "singleton")
    want = {(y, frozenset({y})): L.eps_or_ends_a, (x, frozenset({y})): L.ends_a,
            (y, frozenset({x})): L.ends_b, (x, frozenset({x})): L.eps_or_ends_b}
    out["f cofree"] = cf.automaton.dfa.state_count == 4 and all(
        _lang_ok(cf.automaton, cf.language_state(*k), p) for k, p in want.items()
    )

    f = atom_decomposition(ex, eps, m=m).simplify()
    out["g atom"] = f.render(("x", "y")) == "L(x,{x}) ∩ L(y,{y})" and all(
        f.evaluate(w) == (m.table.class_of(reverse(w)) == eps) for w in oracle.all_words(2, 8)
    )
    return out


def test_ac1_golden():
    t = time.perf_counter()
    out = golden_checks()
    bad = [k for k, v in out.items() if not v]
    ok = not bad
    print(record("AC1", "golden two-state example", ok,
                 "items a-g match" if ok else "mismatch in " + ", ".join(bad), t))
    assert ok, bad


# -------------------------------------------------------------- AC2 / AC3

AC2_LAWS = {"unit", "counit", "language-preservation", "thinness", "monotonicity"}
AC3_LAWS = {"nuc-idempotent", "mupl-minimal", "preformation", "subset-languages", "eta-morphism",
            "embed-cofree", "mupl-stable", "free-is-product"}

_DFA_CACHE: list = []


def dfa_corpus_results():
    if not _DFA_CACHE:
        rng = random.Random(0)
        corpus = [random_accepting(rng, max_states=6, max_letters=3) for _ in range(200)]
        corpus += list(all_accepting_dfas(2, AB))
        results = []
        for a in corpus:
            results += dfa_suite(a)
        _DFA_CACHE.append((len(corpus), results))
    return _DFA_CACHE[0]


def test_ac2_galois_laws():
    t = time.perf_counter()
    n, results = dfa_corpus_results()
    fails, total = tally(results, AC2_LAWS)
    skipped = sum(1 for r in results if r.name == "thinness" and r.witness and r.witness.startswith("skipped"))
    ok = not fails
    print(record("AC2", f"Galois-connection laws on {n} automata", ok,
                 describe(fails, total) + f" (thinness searched exhaustively on {total['thinness'] - skipped}"
                 f"/{total['thinness']} pairs, the rest have >8-state sources)", t))
    assert ok, dict(fails)


def free_product_exhaustive():
    bad = 0
    count = 0
    for n in range(1, 4):
        for d in all_dfas(n, AB):
            count += 1
            parts = [nuc(PointedDfa(d, x)) for x in d.states]
            prod, _ = product_pointed(parts, AB)
            if not isomorphic(free(d), prod):
                bad += 1
    return count, bad


def test_ac3_nuc_mupl_structure():
    t = time.perf_counter()
    n, results = dfa_corpus_results()
    fails, total = tally(results, AC3_LAWS)
    hyp = sum(1 for r in results if r.name == "embed-cofree" and r.witness is None)
    count, bad = free_product_exhaustive()
    if bad:
        fails["free-is-product (exhaustive <=3 states)"] = bad
        total["free-is-product (exhaustive <=3 states)"] = count
    ok = not fails
    print(record("AC3", f"nuc/mupl structure on {n} automata + {count} exhaustive", ok,
                 describe(fails, total) + f"; embed_cofree hypothesis held on {hyp}", t))
    assert ok, dict(fails)


# ------------------------------------------------------------------- AC4


def test_ac4_lasso_suite():
    t = time.perf_counter()
    rng = random.Random(0)
    corpus = [random_lasso(rng, 3) for _ in range(100)]
    for k in (1, 2):
        corpus += list(all_lasso_automata(1, 1, alphabet_of_size(k)))
    results = []
    for la in corpus:
        results += lasso_suite(la)
    fails, total = tally(results)
    ok = not fails
    bad = [la for la in corpus if not law_nuc_of_minimal(la).ok]
    if bad:
        small = min(bad, key=lambda la: (la.x1_count + la.x2_count, len(la.alphabet)))
        fails["nuc(<L>)=<L>"] = len(bad)
        total.setdefault("nuc(<L>)=<L>", len(corpus))
        smallest = law_nuc_of_minimal(small).witness
    print(record("AC4", f"lasso suite on {len(corpus)} automata", ok,
                 describe(fails, total) + (f"; smallest failing case: {smallest}" if bad else ""), t))
    assert ok, dict(fails)


# ------------------------------------------------------------------- AC5


def gamma_vs_naive():
    ls = list(lassos_upto(2, 4, 4))
    longest = 4 * (4 + 4 * 4)
    pre = {l: oracle.naive_infinite_prefix(l.spoke, l.loop, longest) for l in ls}
    bad = 0
    for l1 in ls:
        p1, s1, v1 = pre[l1], len(l1.spoke), len(l1.loop)
        for l2 in ls:
            n = 4 * (max(s1, len(l2.spoke)) + v1 * len(l2.loop))
            if gamma_equivalent(l1, l2) != (p1[:n] == pre[l2][:n]):
                bad += 1
    return len(ls) ** 2, bad


def test_ac5_omega_suite():
    t = time.perf_counter()
    fails, total = Counter(), Counter()

    pairs_checked, bad = gamma_vs_naive()
    total["gamma-vs-naive"] = pairs_checked
    if bad:
        fails["gamma-vs-naive"] = bad

    rng = random.Random(0)
    pairs = oracle.brute_gamma_pairs(2, 4, 4)
    corpus = [random_lasso(rng, 3, AB) for _ in range(100)]
    results = []
    for la in corpus:
        r, _, _ = lasso_reachable_part(la)
        results.append(law_saturation_brute(r, pairs))
        results += law_wilke(r)
        results.append(law_morphism_admissibility(lasso_nuc(r), r))
        q = observable_quotient(r)
        if lasso_unique_morphism(r, q) is not None:
            results.append(law_morphism_admissibility(r, q))
    meet_pairs = [[random_lasso(rng, 3, AB), random_lasso(rng, 3, AB)] for _ in range(50)]
    results += [law_meet(p) for p in meet_pairs]
    f2, t2 = tally(results)
    fails.update(f2)
    total.update(t2)
    ok = not fails
    witness = next((r.witness for r in results if r.name == "meet-preservation" and not r.ok), None)
    detail = describe(fails, total) + (f"; first meet witness {witness}" if witness else "")
    known = law_meet([load(os.path.join(DATA, n)).automaton for n in ("meet_left.aut", "meet_right.aut")])
    if not known.ok:
        detail += f"; note: the pair in meet_left.aut/meet_right.aut (outside the random corpus) fails with {known.witness}"
    print(record("AC5", "omega suite", ok, detail, t))
    assert ok, dict(fails)


# ------------------------------------------------------------------- AC6

CLI_COMMANDS = [
    ["reach", "two_state.aut"],
    ["tmonoid", "two_state.aut"],
    ["machine", "two_state.aut"],
    ["nuc", "two_state.aut"],
    ["free", "two_state.aut"],
    ["cofree", "two_state.aut", "--colorings", "all"],
    ["cofree", "two_state.aut", "--colorings", "singleton"],
    ["mupl", "two_state.aut"],
    ["atoms", "two_state.aut", "--class", "ε"],
    ["lasso", "tmonoid", "even_a.aut"],
    ["lasso", "machine", "even_a.aut"],
    ["lasso", "nuc", "even_a.aut"],
    ["lasso", "mupl", "even_a.aut"],
    ["lasso", "minimal", "even_a.aut"],
    ["lasso", "syntactic", "even_a.aut"],
    ["lasso", "nerode", "even_a.aut"],
    ["omega", "gamma", "a,ba", "ab,ab"],
    ["omega", "adm", "loop_starts_with_a.aut"],
    ["omega", "saturated", "loop_starts_with_a.aut"],
    ["omega", "wilke", "even_a.aut"],
    ["omega", "meet", "meet_left.aut", "meet_right.aut"],
    ["laws", "two_state.aut", "parity_loop.aut", "--random", "2", "--seed", "3"],
]

_DRIVER = r"""
import contextlib, io, os, sys, json
from automalg.cli import main
cmds = json.loads(sys.argv[1]); out_dir = sys.argv[2]
for i, argv in enumerate(cmds):
    for j, fmt in enumerate(([], ["--json"])):
        buf = io.StringIO()
        extra = [] if argv[0] in ("laws", "atoms") or argv[1] == "gamma" else ["--dot", os.path.join(out_dir, f"{i}-{j}.dot")]
        with contextlib.redirect_stdout(buf):
            code = main(argv + fmt + extra)
        sys.stdout.buffer.write(f"== {i} {j} exit {code}\n".encode() + buf.getvalue().encode("utf-8"))
"""


def cli_transcript(tmp, seed):
    import json

    cmds = [[os.path.join(DATA, a) if a.endswith(".aut") else a for a in c] for c in CLI_COMMANDS]
    out_dir = os.path.join(tmp, f"run-{seed}")
    os.makedirs(out_dir, exist_ok=True)
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    proc = subprocess.run([sys.executable, "-c", _DRIVER, json.dumps(cmds), out_dir],
                          capture_output=True, env=env, check=True)
    dots = {name: open(os.path.join(out_dir, name), "rb").read() for name in sorted(os.listdir(out_dir))}
    return proc.stdout, dots


def test_ac6_cli_determinism(tmp_path):
    t = time.perf_counter()
    first = cli_transcript(str(tmp_path), 1)
    second = cli_transcript(str(tmp_path), 2)
    ok = first == second and len(first[0]) > 0
    n = 2 * len(CLI_COMMANDS)
    print(record("AC6", "CLI determinism", ok,
                 f"{n} invocations and {len(first[1])} DOT files byte-identical across two processes"
                 if ok else "outputs differ between runs", t))
    assert ok


if __name__ == "__main__":
    import tempfile

    tests = [test_ac1_golden, test_ac2_galois_laws, test_ac3_nuc_mupl_structure,
             test_ac4_lasso_suite, test_ac5_omega_suite]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    with tempfile.TemporaryDirectory() as d:
        try:
            test_ac6_cli_determinism(__import__("pathlib").Path(d))
        except AssertionError:
            pass
