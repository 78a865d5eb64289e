"""Text file format, JSON and Graphviz rendering.

A file is a sequence of ``key: value`` lines; ``#`` starts a comment::

    type: dfa
    alphabet: a b
    states: x y
    initial: x
    accepting: x
    trans: x a y
    trans: x b x

Alphabet and state lists fix the canonical order; everything else may come
in any order, but names must be declared before a transition uses them.
A ``trans`` line may hold several ``src sym dst`` triples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from .core import AcceptingDfa, Alphabet, AutomatonError, ContractViolation, Dfa
from .lasso import LassoAutomaton
from .monoid import CongruenceRep, NotACongruence, verify_congruence


class ParseError(AutomatonError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class DfaFile:
    dfa: Dfa
    names: tuple
    initial: Optional[int] = None
    accepting: Optional[frozenset] = None

    @property
    def alphabet(self) -> Alphabet:
        return self.dfa.alphabet

    def automaton(self) -> AcceptingDfa:
        return AcceptingDfa(self.dfa, self.accepting or frozenset(), self.initial)


@dataclass(frozen=True)
class CongruenceFile:
    congruence: CongruenceRep
    names: tuple

    @property
    def alphabet(self) -> Alphabet:
        return self.congruence.alphabet


@dataclass(frozen=True)
class LassoFile:
    automaton: LassoAutomaton
    names1: tuple
    names2: tuple

    @property
    def alphabet(self) -> Alphabet:
        return self.automaton.alphabet


AutomatonFile = Union[DfaFile, CongruenceFile, LassoFile]

_LIST_KEYS = {
    "dfa": ("states",),
    "congruence": ("classes",),
    "lasso": ("states1", "states2"),
}
_SINGLE_KEYS = {
    "dfa": ("initial",),
    "congruence": ("epsilon",),
    "lasso": ("initial",),
}
# transition key -> (source list, target list)
_TRANS_KEYS = {
    "dfa": {"trans": ("states", "states")},
    "congruence": {"trans": ("classes", "classes")},
    "lasso": {
        "trans1": ("states1", "states1"),
        "trans2": ("states1", "states2"),
        "trans3": ("states2", "states2"),
    },
}
_ACCEPTING_SORT = {"dfa": "states", "congruence": "classes", "lasso": "states2"}


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", no)
        key, value = line.split(":", 1)
        yield no, key.strip(), value.split()


def parse(text: str) -> AutomatonFile:
    """Parse an automaton file; raise :class:`ParseError` with a line number
    on malformed input and on non-total transition tables."""
    entries = list(_lines(text))
    kind = None
    for no, key, val in entries:
        if key == "type":
            if kind is not None:
                raise ParseError("duplicate 'type'", no)
            if len(val) != 1 or val[0] not in _LIST_KEYS:
                raise ParseError("type must be one of dfa, congruence, lasso", no)
            kind = val[0]
    if kind is None:
        raise ParseError("missing 'type' line")

    trans_keys = _TRANS_KEYS[kind]
    known = {"type", "alphabet", "accepting", *_LIST_KEYS[kind], *_SINGLE_KEYS[kind], *trans_keys}
    alphabet = None
    lists: dict = {}
    singles: dict = {}
    accepting = None
    tables: dict = {k: {} for k in trans_keys}
    declared_at: dict = {}

    def lookup(sort, name, no):
        if sort not in lists:
            raise ParseError(f"{name!r} used before '{sort}:' is declared", no)
        try:
            return lists[sort][1][name]
        except KeyError:
            raise ParseError(f"unknown name {name!r} in {sort}", no) from None

    for no, key, val in entries:
        if key not in known:
            raise ParseError(f"unexpected key {key!r} for type {kind}", no)
        if key in declared_at and key not in trans_keys:
            raise ParseError(f"duplicate {key!r} (first on line {declared_at[key]})", no)
        declared_at.setdefault(key, no)
        if key == "type":
            continue
        if key == "alphabet":
            if not val or len(set(val)) != len(val):
                raise ParseError("alphabet must list distinct symbols", no)
            alphabet = Alphabet(tuple(val))
        elif key in _LIST_KEYS[kind]:
            if not val or len(set(val)) != len(val):
                raise ParseError(f"{key} must list distinct names", no)
            lists[key] = (tuple(val), {n: i for i, n in enumerate(val)})
        elif key in _SINGLE_KEYS[kind]:
            if len(val) != 1:
                raise ParseError(f"{key} takes exactly one name", no)
            singles[key] = (val[0], no)
        elif key == "accepting":
            accepting = (val, no)
        else:
            if alphabet is None:
                raise ParseError("transition before 'alphabet:'", no)
            if len(val) % 3 or not val:
                raise ParseError("transitions come in 'src sym dst' triples", no)
            src_sort, dst_sort = trans_keys[key]
            for i in range(0, len(val), 3):
                s, sym, t = val[i:i + 3]
                si = lookup(src_sort, s, no)
                if sym not in alphabet.symbols:
                    raise ParseError(f"unknown symbol {sym!r}", no)
                a = alphabet.index(sym)
                ti = lookup(dst_sort, t, no)
                old = tables[key].get((si, a))
                if old is not None and old[0] != ti:
                    raise ParseError(f"conflicting transition for {s} {sym} (line {old[1]})", no)
                tables[key][(si, a)] = (ti, no)

    if alphabet is None:
        raise ParseError("missing 'alphabet' line")
    for k in _LIST_KEYS[kind]:
        if k not in lists:
            raise ParseError(f"missing '{k}' line")

    def table(key):
        src_sort = trans_keys[key][0]
        names = lists[src_sort][0]
        rows = []
        for i, n in enumerate(names):
            row = []
            for a, sym in enumerate(alphabet.symbols):
                hit = tables[key].get((i, a))
                if hit is None:
                    raise ParseError(f"{key}: no transition for {n} {sym} (table must be total)", declared_at.get(key))
                row.append(hit[0])
            rows.append(tuple(row))
        return tuple(rows)

    def single(key):
        if key not in singles:
            return None
        name, no = singles[key]
        return lookup(_LIST_KEYS[kind][0], name, no)

    acc = None
    if accepting is not None:
        sort = _ACCEPTING_SORT[kind]
        acc = frozenset(lookup(sort, n, accepting[1]) for n in accepting[0])

    if kind == "dfa":
        names = lists["states"][0]
        return DfaFile(Dfa(len(names), alphabet, table("trans")), names, single("initial"), acc)
    if kind == "lasso":
        n1, n2 = lists["states1"][0], lists["states2"][0]
        la = LassoAutomaton(alphabet, len(n1), len(n2), table("trans1"), table("trans2"),
                            table("trans3"), single("initial"), acc)
        return LassoFile(la, n1, n2)
    return _congruence_file(alphabet, lists["classes"][0], single("epsilon"), table("trans"), acc)


def _congruence_file(alphabet, names, eps, right, acc) -> CongruenceFile:
    if eps is None:
        raise ParseError("congruence needs an 'epsilon:' class")
    try:
        c = verify_congruence(alphabet, len(names), eps, right, acc)
    except NotACongruence as exc:
        raise ContractViolation(str(exc)) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    # verify_congruence renumbers classes in BFS order from epsilon
    order = [eps]
    seen = {eps}
    i = 0
    while i < len(order):
        for t in right[order[i]]:
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return CongruenceFile(c, tuple(names[q] for q in order))


def load(path: str) -> AutomatonFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ------------------------------------------------------------ serialization


def _trans_lines(key, rows, src_names, dst_names, alphabet) -> list:
    return [
        f"{key}: {src_names[s]} {sym} {dst_names[t]}"
        for s, row in enumerate(rows)
        for sym, t in zip(alphabet.symbols, row)
    ]


def serialize(f: AutomatonFile) -> str:
    out = []
    if isinstance(f, DfaFile):
        out += ["type: dfa", "alphabet: " + " ".join(f.alphabet), "states: " + " ".join(f.names)]
        if f.initial is not None:
            out.append(f"initial: {f.names[f.initial]}")
        if f.accepting is not None:
            out.append(("accepting: " + " ".join(f.names[s] for s in sorted(f.accepting))).rstrip())
        out += _trans_lines("trans", f.dfa.delta, f.names, f.names, f.alphabet)
    elif isinstance(f, CongruenceFile):
        c = f.congruence
        out += ["type: congruence", "alphabet: " + " ".join(f.alphabet), "classes: " + " ".join(f.names),
                f"epsilon: {f.names[c.eps_class]}"]
        if c.accepted_classes is not None:
            out.append(("accepting: " + " ".join(f.names[q] for q in sorted(c.accepted_classes))).rstrip())
        out += _trans_lines("trans", c.right_step, f.names, f.names, f.alphabet)
    else:
        la = f.automaton
        out += ["type: lasso", "alphabet: " + " ".join(f.alphabet),
                "states1: " + " ".join(f.names1), "states2: " + " ".join(f.names2)]
        if la.initial is not None:
            out.append(f"initial: {f.names1[la.initial]}")
        if la.accepting is not None:
            out.append(("accepting: " + " ".join(f.names2[y] for y in sorted(la.accepting))).rstrip())
        out += _trans_lines("trans1", la.delta1, f.names1, f.names1, f.alphabet)
        out += _trans_lines("trans2", la.delta2, f.names1, f.names2, f.alphabet)
        out += _trans_lines("trans3", la.delta3, f.names2, f.names2, f.alphabet)
    return "\n".join(out) + "\n"


def to_json(f: AutomatonFile) -> dict:
    """A JSON-ready description with names in place of indices."""
    syms = f.alphabet.symbols

    def table(rows, src, dst):
        return {src[s]: {sym: dst[t] for sym, t in zip(syms, row)} for s, row in enumerate(rows)}

    if isinstance(f, DfaFile):
        return {
            "type": "dfa",
            "alphabet": list(syms),
            "states": list(f.names),
            "initial": None if f.initial is None else f.names[f.initial],
            "accepting": None if f.accepting is None else [f.names[s] for s in sorted(f.accepting)],
            "trans": table(f.dfa.delta, f.names, f.names),
        }
    if isinstance(f, CongruenceFile):
        c = f.congruence
        return {
            "type": "congruence",
            "alphabet": list(syms),
            "classes": list(f.names),
            "representatives": [f.alphabet.format(w) for w in c.representative],
            "epsilon": f.names[c.eps_class],
            "right": table(c.right_step, f.names, f.names),
            "left": {sym: {f.names[q]: f.names[t] for q, t in enumerate(c.left_step[a])}
                     for a, sym in enumerate(syms)},
            "accepting": None if c.accepted_classes is None
            else [f.names[q] for q in sorted(c.accepted_classes)],
        }
    la = f.automaton
    return {
        "type": "lasso",
        "alphabet": list(syms),
        "states1": list(f.names1),
        "states2": list(f.names2),
        "initial": None if la.initial is None else f.names1[la.initial],
        "accepting": None if la.accepting is None else [f.names2[y] for y in sorted(la.accepting)],
        "trans1": table(la.delta1, f.names1, f.names1),
        "trans2": table(la.delta2, f.names1, f.names2),
        "trans3": table(la.delta3, f.names2, f.names2),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------- DOT


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _edges(rows, src, dst, syms, prefix_src="", prefix_dst="") -> list:
    out = []
    for s, row in enumerate(rows):
        grouped: dict = {}
        for sym, t in zip(syms, row):
            grouped.setdefault(t, []).append(sym)
        for t in sorted(grouped):
            label = ",".join(grouped[t])
            out.append(f"  {_quote(prefix_src + src[s])} -> {_quote(prefix_dst + dst[t])} [label={_quote(label)}];")
    return out


def to_dot(f: AutomatonFile) -> str:
    """Graphviz source; node ids are the state names, accepting states are
    double circles and the initial state gets an arrow from a point node."""
    syms = f.alphabet.symbols
    out = ["digraph automaton {", "  rankdir=LR;", '  node [shape=circle];']
    if isinstance(f, (DfaFile, CongruenceFile)):
        if isinstance(f, DfaFile):
            rows, init, acc = f.dfa.delta, f.initial, f.accepting or frozenset()
        else:
            c = f.congruence
            rows, init, acc = c.right_step, c.eps_class, c.accepted_classes or frozenset()
        for i, n in enumerate(f.names):
            shape = "doublecircle" if i in acc else "circle"
            out.append(f"  {_quote(n)} [shape={shape}];")
        if init is not None:
            out.append('  "__start" [shape=point];')
            out.append(f"  \"__start\" -> {_quote(f.names[init])};")
        out += _edges(rows, f.names, f.names, syms)
    else:
        la = f.automaton
        acc = la.accepting or frozenset()
        # the sorts may share names, so node ids carry the sort
        out.append("  subgraph cluster_words {")
        out.append('    label="sort 1";')
        for n in f.names1:
            out.append(f"    {_quote('1:' + n)} [label={_quote(n)}, shape=circle];")
        out.append("  }")
        out.append("  subgraph cluster_loops {")
        out.append('    label="sort 2";')
        for i, n in enumerate(f.names2):
            shape = "doublecircle" if i in acc else "circle"
            out.append(f"    {_quote('2:' + n)} [label={_quote(n)}, shape={shape}];")
        out.append("  }")
        if la.initial is not None:
            out.append('  "__start" [shape=point];')
            out.append(f"  \"__start\" -> {_quote('1:' + f.names1[la.initial])};")
        out += _edges(la.delta1, f.names1, f.names1, syms, "1:", "1:")
        out += _edges(la.delta2, f.names1, f.names2, syms, "1:", "2:")
        out += _edges(la.delta3, f.names2, f.names2, syms, "2:", "2:")
    out.append("}")
    return "\n".join(out) + "\n"
