"""The ``aut`` command line.

Automaton-valued commands print the text file format (or JSON with
``--json``) and can also write Graphviz with ``--dot PATH``.  Exit codes:
0 pass, 1 law failure, 2 parse error, 3 size guard, 4 contract violation.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional, Sequence

from . import io
from .core import (
    AlphabetMismatch,
    AcceptingDfa,
    Alphabet,
    ContractViolation,
    PointedDfa,
    SizeGuardError,
    reachable_part,
    words_upto,
)
from .equations import atom_decomposition, cofree, mupl, reverse
from .generate import random_accepting, random_lasso
from .laws import dfa_suite, lasso_suite, law_meet, law_unit, omega_suite, report
from .lasso import (
    Lasso,
    LassoAutomaton,
    LassoCongruenceRep,
    lasso_machine,
    lasso_mupl,
    lasso_nuc,
    lasso_reachable_part,
    lasso_transition,
    lasso_transition_with_acceptance,
    lasso_minimal,
    myhill_nerode,
)
from .monoid import (
    CongruenceRep,
    kernel_congruence,
    m_with_acceptance,
    machine,
    t_with_acceptance,
    transition_monoid,
)
from .omega import (
    admissible_sets,
    gamma_bound,
    gamma_equivalent,
    reachable_meet,
    saturation_partition,
    saturation_witness,
    wilke_laws,
    wilke_of,
)

EXIT_OK, EXIT_LAW, EXIT_PARSE, EXIT_SIZE, EXIT_CONTRACT = 0, 1, 2, 3, 4


# ------------------------------------------------------------------ naming


def class_names(c: CongruenceRep) -> tuple:
    return tuple(f"[{c.alphabet.format(w)}]" for w in c.representative)


def lasso_class_names(c: LassoCongruenceRep) -> tuple:
    return tuple(f"[{l.format(c.alphabet)}]" for l in c.lasso_rep)


def subset_label(names: Sequence[str], mask: int) -> str:
    return "{" + ",".join(n for i, n in enumerate(names) if mask >> i & 1) + "}"


def _congruence_file(c: CongruenceRep) -> io.CongruenceFile:
    return io.CongruenceFile(c, class_names(c))


def _machine_file(c: CongruenceRep) -> io.DfaFile:
    acc = c.accepted_classes
    return io.DfaFile(machine(c).dfa, class_names(c), c.eps_class, acc)


def _lasso_machine_file(c: LassoCongruenceRep) -> io.LassoFile:
    return io.LassoFile(lasso_machine(c), class_names(c.word_part), lasso_class_names(c))


def lasso_congruence_json(c: LassoCongruenceRep) -> dict:
    w = c.word_part
    words, lassos = class_names(w), lasso_class_names(c)
    syms = c.alphabet.symbols
    return {
        "type": "lasso-congruence",
        "alphabet": list(syms),
        "word_classes": list(words),
        "lasso_classes": list(lassos),
        "epsilon": words[w.eps_class],
        "right": {words[q]: {s: words[t] for s, t in zip(syms, row)} for q, row in enumerate(w.right_step)},
        "left": {s: {words[q]: words[t] for q, t in enumerate(w.left_step[a])} for a, s in enumerate(syms)},
        "sigma2": {words[q]: {s: lassos[t] for s, t in zip(syms, row)} for q, row in enumerate(c.sigma2)},
        "sigma3": {lassos[p]: {s: lassos[t] for s, t in zip(syms, row)} for p, row in enumerate(c.sigma3)},
        "left_ext": {s: {lassos[p]: lassos[t] for p, t in enumerate(c.left_ext[a])} for a, s in enumerate(syms)},
        "accepting": None if c.accepted is None else [lassos[p] for p in sorted(c.accepted)],
    }


# ------------------------------------------------------------------ output


def emit(args, f: io.AutomatonFile, extra: Optional[dict] = None, trailer: Sequence[str] = ()) -> None:
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(io.to_dot(f))
    if args.json:
        obj = io.to_json(f)
        if extra:
            obj.update(extra)
        sys.stdout.write(io.dumps(obj))
    else:
        sys.stdout.write(io.serialize(f))
        for line in trailer:
            sys.stdout.write(f"# {line}\n")


def emit_json(obj) -> None:
    sys.stdout.write(io.dumps(obj))


def _load(path: str, kind=None):
    f = io.load(path)
    if kind is not None and not isinstance(f, kind):
        want = {io.DfaFile: "dfa", io.LassoFile: "lasso", io.CongruenceFile: "congruence"}[kind]
        raise ContractViolation(f"{path}: expected a {want} file")
    return f


def _pointed(f: io.DfaFile) -> PointedDfa:
    return PointedDfa(f.dfa, 0 if f.initial is None else f.initial)


def _accepting(f: io.DfaFile) -> AcceptingDfa:
    if f.accepting is None:
        raise ContractViolation("this command needs an 'accepting:' line")
    return AcceptingDfa(f.dfa, f.accepting, 0 if f.initial is None else f.initial)


def _require_lasso_initial(la: LassoAutomaton) -> LassoAutomaton:
    return la if la.initial is not None else la.with_initial(0)


# -------------------------------------------------------- one-sorted commands


def cmd_reach(args) -> int:
    f = _load(args.file)
    if isinstance(f, io.DfaFile):
        p, mapping = reachable_part(_pointed(f))
        names = [None] * p.dfa.state_count
        for old, new in mapping.items():
            names[new] = f.names[old]
        acc = None if f.accepting is None else frozenset(mapping[s] for s in f.accepting if s in mapping)
        emit(args, io.DfaFile(p.dfa, tuple(names), 0, acc))
    elif isinstance(f, io.LassoFile):
        la = _require_lasso_initial(f.automaton)
        r, map1, map2 = lasso_reachable_part(la)
        n1, n2 = [None] * r.x1_count, [None] * r.x2_count
        for old, new in map1.items():
            n1[new] = f.names1[old]
        for old, new in map2.items():
            n2[new] = f.names2[old]
        emit(args, io.LassoFile(r, tuple(n1), tuple(n2)))
    else:
        emit(args, f)
    return EXIT_OK


def cmd_tmonoid(args) -> int:
    f = _load(args.file, io.DfaFile)
    c = t_with_acceptance(_accepting(f)) if f.accepting is not None else transition_monoid(_pointed(f))
    emit(args, _congruence_file(c))
    return EXIT_OK


def cmd_machine(args) -> int:
    f = _load(args.file)
    if isinstance(f, io.CongruenceFile):
        c = f.congruence
        if c.accepted_classes is not None:
            m = m_with_acceptance(c)
            emit(args, io.DfaFile(m.dfa, f.names, m.initial, m.accepting))
        else:
            emit(args, io.DfaFile(machine(c).dfa, f.names, c.eps_class))
        return EXIT_OK
    if isinstance(f, io.DfaFile):
        return cmd_nuc(args)
    raise ContractViolation("machine expects a dfa or congruence file; use 'aut lasso machine' for lassos")


def cmd_nuc(args) -> int:
    f = _load(args.file, io.DfaFile)
    c = t_with_acceptance(_accepting(f)) if f.accepting is not None else transition_monoid(_pointed(f))
    emit(args, _machine_file(c))
    return EXIT_OK


def cmd_free(args) -> int:
    f = _load(args.file, io.DfaFile)
    emit(args, _machine_file(kernel_congruence(f.dfa)))
    return EXIT_OK


def cmd_cofree(args) -> int:
    f = _load(args.file, io.DfaFile)
    cf = cofree(f.dfa, args.colorings)
    names = []
    for members in cf.members:
        x, U = members[0]
        names.append(f"L({f.names[x]},{{{','.join(f.names[s] for s in sorted(U))}}})")
    a = cf.automaton
    emit(args, io.DfaFile(a.dfa, tuple(names), None, a.accepting))
    return EXIT_OK


def cmd_mupl(args) -> int:
    f = _load(args.file, io.DfaFile)
    a = _accepting(f)
    m = mupl(a, max_classes=args.max_classes)
    full = m.as_accepting(m.initial)
    reps = class_names(m.table)
    names = tuple(subset_label(reps, mask) for mask in range(m.state_count))
    emit(args, io.DfaFile(full.dfa, names, full.initial, full.accepting))
    return EXIT_OK


def cmd_atoms(args) -> int:
    f = _load(args.file, io.DfaFile)
    a = _accepting(f)
    m = mupl(a, max_classes=None)
    t = m.table
    q = t.class_of(f.alphabet.word(args.rep))
    formula = atom_decomposition(a, q, m=m).simplify()
    bad = None
    for u in words_upto(len(f.alphabet), args.max_len):
        if formula.evaluate(u) != (t.class_of(reverse(u)) == q):
            bad = f.alphabet.format(u)
            break
    atom = "{" + class_names(t)[q] + "}"
    check = {"check": f"atom {atom} bounded to length {args.max_len}", "status": "pass" if bad is None else "fail"}
    if bad is not None:
        check["witness"] = bad
    if args.json:
        emit_json({"atom": atom, "formula": formula.render(f.names), "report": [check]})
    else:
        sys.stdout.write(f"atom: {atom}\nformula: {formula.render(f.names)}\n")
        sys.stdout.write(f"{check['status']}: {check['check']}" + (f" (witness {bad})" if bad else "") + "\n")
    return EXIT_OK if bad is None else EXIT_LAW


# ------------------------------------------------------------ lasso commands


def _lasso(args) -> LassoAutomaton:
    return _require_lasso_initial(_load(args.file, io.LassoFile).automaton)


def cmd_lasso(args) -> int:
    la = _lasso(args)
    op = args.op
    if op in ("tmonoid", "syntactic"):
        if op == "syntactic":
            la.require_accepting()
            m = lasso_minimal(la)
            c = lasso_transition_with_acceptance(m)
        elif la.accepting is not None:
            c = lasso_transition_with_acceptance(la)
        else:
            c = lasso_transition(la)
        emit_json(lasso_congruence_json(c))
        return EXIT_OK
    if op == "machine":
        c = lasso_transition_with_acceptance(la) if la.accepting is not None else lasso_transition(la)
        emit(args, _lasso_machine_file(c))
        return EXIT_OK
    if op == "nuc":
        c = lasso_transition(la)
        n = lasso_nuc(la, la.accepting)
        emit(args, io.LassoFile(n, class_names(c.word_part), lasso_class_names(c)))
        return EXIT_OK
    if op in ("minimal", "nerode"):
        la.require_accepting()
        mn = myhill_nerode(la)
        words = tuple(f"[{la.alphabet.format(w)}]" for w in mn.word_reps)
        lassos = tuple(f"[{l.format(la.alphabet)}]" for l in mn.lasso_reps)
        if op == "minimal":
            emit(args, io.LassoFile(mn.minimal, words, lassos))
        else:
            emit_json({"word_classes": list(words), "lasso_classes": list(lassos)})
        return EXIT_OK
    if op == "mupl":
        la.require_accepting()
        m = lasso_mupl(la, max_classes=args.max_classes)
        out = m.as_automaton(m.initial)
        lreps = lasso_class_names(m.table)
        wreps = class_names(m.table.word_part)
        n1 = tuple(subset_label(lreps, P) for P in range(out.x1_count))
        n2 = tuple(subset_label(wreps, V) for V in range(out.x2_count))
        emit(args, io.LassoFile(out, n1, n2))
        return EXIT_OK
    raise ContractViolation(f"unknown lasso operation {op}")


# ------------------------------------------------------------ omega commands


def _alphabet_of(texts: Sequence[str]) -> Alphabet:
    letters = sorted({ch for t in texts for ch in t if ch not in "(),ε \t"})
    return Alphabet(tuple(letters or ["a"]))


def cmd_omega(args) -> int:
    op = args.op
    if op == "gamma":
        if len(args.files) != 2:
            raise io.ParseError("gamma takes exactly two lassos, e.g. 'a,b' '(ab,ab)'")
        alphabet = _alphabet_of(args.files)
        try:
            l1, l2 = (Lasso.parse(alphabet, t) for t in args.files)
        except (ValueError, KeyError) as exc:
            raise io.ParseError(str(exc)) from None
        eq = gamma_equivalent(l1, l2)
        bound = gamma_bound(l1, l2)
        if args.json:
            emit_json({"left": l1.format(alphabet), "right": l2.format(alphabet), "equivalent": eq, "bound": bound})
        else:
            rel = "≡γ" if eq else "≢γ"
            sys.stdout.write(f"{l1.format(alphabet)} {rel} {l2.format(alphabet)} (prefix bound {bound})\n")
        return EXIT_OK

    files = [_load(p, io.LassoFile) for p in args.files]
    if op == "meet":
        if not files:
            raise ContractViolation("meet needs at least one file")
        las = [_require_lasso_initial(f.automaton) for f in files]
        meet, t1, t2 = reachable_meet(las)
        n1 = tuple("<" + ",".join(f.names1[x] for f, x in zip(files, tup)) + ">" for tup in t1)
        n2 = tuple("<" + ",".join(f.names2[y] for f, y in zip(files, tup)) + ">" for tup in t2)
        res = law_meet(las)
        rep = report([res])
        emit(args, io.LassoFile(meet, n1, n2), extra={"report": rep},
             trailer=[f"{r['check']}: {r['status']}" + (f" ({r['witness']})" if "witness" in r else "") for r in rep])
        return EXIT_OK if res.ok else EXIT_LAW

    if len(files) != 1:
        raise ContractViolation(f"omega {op} takes exactly one file")
    f = files[0]
    la = _require_lasso_initial(f.automaton)
    r, map1, map2 = lasso_reachable_part(la)
    n2 = [None] * r.x2_count
    for old, new in map2.items():
        n2[new] = f.names2[old]
    if op == "adm":
        part = saturation_partition(r)
        classes = [[n2[y] for y in cls] for cls in part.base.classes()]
        sets = [sorted((n2[y] for y in s), key=n2.index) for s in admissible_sets(r, args.max_classes)]
        if args.json:
            emit_json({"E": classes, "admissible": sets})
        else:
            sys.stdout.write("E: " + " ".join("{" + ",".join(c) + "}" for c in classes) + "\n")
            for s in sets:
                sys.stdout.write("admissible: {" + ",".join(s) + "}\n")
        return EXIT_OK
    if op == "saturated":
        r.require_accepting()
        w = saturation_witness(r)
        rec = {"check": "saturated", "status": "pass" if w is None else "fail"}
        if w is not None:
            rec["witness"] = (
                f"{w.rule}: from {f.names1[_inverse(map1)[w.start]]}, {w.lasso_left.format(r.alphabet)} reaches "
                f"{n2[w.left]} and {w.lasso_right.format(r.alphabet)} reaches {n2[w.right]}"
            )
        _print_report(args, [rec])
        return EXIT_OK if w is None else EXIT_LAW
    if op == "wilke":
        wk = wilke_of(r)
        laws = report(wilke_laws(r, wk))
        plus = [r.alphabet.format(w) for w in wk.plus.words]
        ups = [f"[{l.format(r.alphabet)}]" for l in wk.up_rep]
        obj = {
            "plus_classes": plus,
            "up_classes": ups,
            "omega": {plus[s]: ups[u] for s, u in enumerate(wk.omega_map)},
            "E": [[n2[y] for y in cls] for cls in wk.partition.base.classes()],
            "report": laws,
        }
        if args.json:
            emit_json(obj)
        else:
            sys.stdout.write("plus classes: " + " ".join(plus) + "\n")
            sys.stdout.write("up classes: " + " ".join(ups) + "\n")
            for s, u in enumerate(wk.omega_map):
                sys.stdout.write(f"omega: ({plus[s]})^ω -> {ups[u]}\n")
            _print_report(args, laws)
        return EXIT_OK if all(x["status"] != "fail" for x in laws) else EXIT_LAW
    raise ContractViolation(f"unknown omega operation {op}")


def _inverse(mapping: dict) -> dict:
    return {v: k for k, v in mapping.items()}


def _print_report(args, records) -> None:
    if args.json:
        emit_json(records)
        return
    for r in records:
        line = f"{r['status']}: {r['check']}"
        if "witness" in r:
            line += f" ({r['witness']})"
        sys.stdout.write(line + "\n")


# ---------------------------------------------------------------- law suite


def _suite_for(f) -> list:
    if isinstance(f, io.DfaFile):
        a = AcceptingDfa(f.dfa, f.accepting or frozenset(), 0 if f.initial is None else f.initial)
        return dfa_suite(a)
    if isinstance(f, io.LassoFile):
        la = _require_lasso_initial(f.automaton)
        return lasso_suite(la) + omega_suite(la)
    c = f.congruence
    results = [law_unit(c)]
    if c.accepted_classes is not None:
        results += dfa_suite(m_with_acceptance(c))
    return results


def cmd_laws(args) -> int:
    records = []
    for path in args.files:
        for rec in report(_suite_for(_load(path))):
            rec["check"] = f"{path}: {rec['check']}"
            records.append(rec)
    rng = random.Random(args.seed)
    for i in range(args.random):
        a = random_accepting(rng)
        for rec in report(dfa_suite(a)):
            rec["check"] = f"random-dfa-{i}: {rec['check']}"
            records.append(rec)
        la = random_lasso(rng)
        for rec in report(lasso_suite(la) + omega_suite(la)):
            rec["check"] = f"random-lasso-{i}: {rec['check']}"
            records.append(rec)
    emit_json(records)
    return EXIT_OK if all(r["status"] != "fail" for r in records) else EXIT_LAW


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dot", metavar="PATH", help="also write Graphviz DOT to PATH")
    common.add_argument("--json", action="store_true", help="print JSON instead of the text format")
    common.add_argument("--max-len", type=int, default=8, metavar="N", help="word length bound for bounded checks")
    common.add_argument("--seed", type=int, default=0, metavar="N", help="seed for --random corpora")

    parser = argparse.ArgumentParser(prog="aut", description="Equations, coequations and Wilke congruences of automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    def file_cmd(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("file")
        p.set_defaults(fn=fn)
        return p

    file_cmd("reach", cmd_reach, "reachable part")
    file_cmd("tmonoid", cmd_tmonoid, "transition congruence as a class table")
    file_cmd("machine", cmd_machine, "right-Cayley machine of a congruence")
    file_cmd("nuc", cmd_nuc, "machine of the transition congruence")
    file_cmd("free", cmd_free, "machine of the kernel over all states")
    p = file_cmd("cofree", cmd_cofree, "distinct state languages under colorings")
    p.add_argument("--colorings", choices=("all", "singleton"), default="all")
    p = file_cmd("mupl", cmd_mupl, "the subset automaton dual to nuc")
    p.add_argument("--max-classes", type=int, default=12, metavar="N")
    p = file_cmd("atoms", cmd_atoms, "atom decomposition of one class")
    p.add_argument("--class", dest="rep", required=True, metavar="REP", help="a word in the class, e.g. ε or ab")

    p = sub.add_parser("lasso", parents=[common], help="lasso automata")
    p.add_argument("op", choices=("tmonoid", "machine", "nuc", "mupl", "minimal", "syntactic", "nerode"))
    p.add_argument("file")
    p.add_argument("--max-classes", type=int, default=10, metavar="N")
    p.set_defaults(fn=cmd_lasso)

    p = sub.add_parser("omega", parents=[common], help="γ-equivalence, admissibility and Wilke congruences")
    p.add_argument("op", choices=("gamma", "adm", "saturated", "wilke", "meet"))
    p.add_argument("files", nargs="+", metavar="ARG")
    p.add_argument("--max-classes", type=int, default=12, metavar="N")
    p.set_defaults(fn=cmd_omega)

    p = sub.add_parser("laws", parents=[common], help="run the law suite, report as JSON")
    p.add_argument("files", nargs="*", metavar="FILE")
    p.add_argument("--random", type=int, default=0, metavar="K", help="also check K random automata of each kind")
    p.set_defaults(fn=cmd_laws)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except io.ParseError as exc:
        print(f"aut: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"aut: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeGuardError as exc:
        print(f"aut: size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ContractViolation, AlphabetMismatch) as exc:
        print(f"aut: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
