import json
import os
import subprocess
import sys

import pytest

from automalg import io
from automalg.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nuc_with_dot(capsys, tmp_path):
    dot = tmp_path / "nuc.dot"
    code, out, _ = run(capsys, "nuc", data("two_state.aut"), "--dot", str(dot))
    assert code == 0
    f = io.parse(out)
    assert f.names == ("[ε]", "[a]", "[b]")
    assert f.dfa.delta == ((1, 2), (1, 2), (1, 2))
    assert f.accepting == frozenset({0, 2})
    text = dot.read_text(encoding="utf-8")
    assert text.count("shape=doublecircle") == 2 and '"[a]" -> "[a]" [label="a"]' in text


def test_tmonoid_json_single_class(capsys, tmp_path):
    p = tmp_path / "one.aut"
    p.write_text("type: dfa\nalphabet: a\nstates: s\ninitial: s\ntrans: s a s\n", encoding="utf-8")
    code, out, _ = run(capsys, "tmonoid", str(p), "--json")
    obj = json.loads(out)
    assert code == 0 and obj["classes"] == ["[ε]"] and obj["right"] == {"[ε]": {"a": "[ε]"}}


def test_machine_of_congruence_file(capsys, tmp_path):
    code, out, _ = run(capsys, "tmonoid", data("two_state.aut"))
    p = tmp_path / "c.aut"
    p.write_text(out, encoding="utf-8")
    code, out2, _ = run(capsys, "machine", str(p))
    assert code == 0
    m = io.parse(out2)
    assert m.dfa.state_count == 3 and m.accepting == frozenset({0, 2})


def test_mupl_and_cofree(capsys):
    code, out, _ = run(capsys, "mupl", data("two_state.aut"))
    f = io.parse(out)
    assert code == 0 and f.dfa.state_count == 8 and len(f.accepting) == 4
    assert f.names[f.initial] == "{[ε],[b]}"
    code, out, _ = run(capsys, "cofree", data("two_state.aut"), "--colorings", "singleton")
    assert io.parse(out).names == ("L(x,{x})", "L(y,{x})", "L(x,{y})", "L(y,{y})")


def test_atoms(capsys):
    code, out, _ = run(capsys, "atoms", data("two_state.aut"), "--class", "ε")
    assert code == 0
    assert "formula: L(x,{x}) ∩ L(y,{y})" in out and out.rstrip().endswith("bounded to length 8")


def test_lasso_commands(capsys):
    f = data("loop_starts_with_a.aut")
    code, out, _ = run(capsys, "lasso", "tmonoid", f)
    obj = json.loads(out)
    assert code == 0 and obj["lasso_classes"] == ["[(ε,a)]", "[(ε,b)]"]
    code, out, _ = run(capsys, "lasso", "minimal", f)
    m = io.parse(out)
    assert (m.automaton.x1_count, m.automaton.x2_count) == (1, 2)
    code, out, _ = run(capsys, "lasso", "nerode", f)
    assert json.loads(out) == {"word_classes": ["[ε]"], "lasso_classes": ["[(ε,a)]", "[(ε,b)]"]}
    code, out, _ = run(capsys, "lasso", "mupl", f)
    assert code == 0 and io.parse(out).automaton.x1_count == 4


def test_omega_commands(capsys):
    code, out, _ = run(capsys, "omega", "gamma", "a,ba", "(ab,ab)", "--json")
    assert code == 0 and json.loads(out)["equivalent"] is True
    code, out, _ = run(capsys, "omega", "saturated", data("even_a.aut"))
    assert code == 0 and out == "pass: saturated\n"
    code, out, _ = run(capsys, "omega", "saturated", data("loop_starts_with_a.aut"))
    assert code == 1 and out.startswith("fail: saturated (rotate")
    code, out, _ = run(capsys, "omega", "adm", data("loop_starts_with_a.aut"))
    assert out == "E: {p,q}\nadmissible: {}\nadmissible: {p,q}\n"
    code, out, _ = run(capsys, "omega", "wilke", data("even_a.aut"), "--json")
    obj = json.loads(out)
    assert code == 0 and all(r["status"] == "pass" for r in obj["report"])


def test_meet_reports_failure(capsys):
    code, out, _ = run(capsys, "omega", "meet", data("meet_left.aut"), data("meet_right.aut"))
    assert code == 1
    assert out.splitlines()[-1] == "# meet-preservation: fail (intersection finer than meet fails: (ε,a) vs (b,a))"
    # the output is still a valid automaton file
    assert io.parse(out).automaton.x2_count == 4


def test_laws_report(capsys):
    code, out, _ = run(capsys, "laws", data("two_state.aut"))
    records = json.loads(out)
    assert code == 0 and records and all(set(r) <= {"check", "status", "witness"} for r in records)
    assert all(r["status"] == "pass" for r in records)
    code, out, _ = run(capsys, "laws", data("parity_loop.aut"))
    assert code == 1
    failed = [r for r in json.loads(out) if r["status"] == "fail"]
    assert [r["check"].split(": ")[1] for r in failed] == ["nuc(<L>)=<L>"]


def test_laws_random_is_seeded(capsys):
    _, out1, _ = run(capsys, "laws", "--random", "2", "--seed", "4")
    _, out2, _ = run(capsys, "laws", "--random", "2", "--seed", "4")
    assert out1 == out2 and "random-lasso-1" in out1


@pytest.mark.parametrize(
    "argv, code",
    [
        (["nuc", "missing-file.aut"], 2),
        (["lasso", "nuc", "two_state.aut"], 4),
        (["mupl", "two_state.aut", "--max-classes", "2"], 3),
        (["omega", "gamma", "a,"], 2),
        (["omega", "adm", "two_state.aut"], 4),
    ],
)
def test_exit_codes(capsys, argv, code):
    argv = [data(a) if a.endswith(".aut") and a != "missing-file.aut" else a for a in argv]
    assert run(capsys, *argv)[0] == code


def test_parse_error_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.aut"
    p.write_text("type: dfa\nalphabet: a\nstates: s\ntrans: s a t\n", encoding="utf-8")
    code, _, err = run(capsys, "reach", str(p))
    assert code == 2 and "line 4" in err


def test_totality_violation_exit_code(capsys, tmp_path):
    p = tmp_path / "partial.aut"
    p.write_text("type: dfa\nalphabet: a b\nstates: s\ntrans: s a s\n", encoding="utf-8")
    code, _, err = run(capsys, "nuc", str(p))
    assert code == 2 and "total" in err


COMMANDS = [
    ["reach", "two_state.aut"],
    ["tmonoid", "two_state.aut"],
    ["machine", "two_state.aut"],
    ["nuc", "two_state.aut"],
    ["free", "two_state.aut"],
    ["cofree", "two_state.aut"],
    ["mupl", "two_state.aut"],
    ["atoms", "two_state.aut", "--class", "b"],
    ["lasso", "tmonoid", "even_a.aut"],
    ["lasso", "machine", "even_a.aut"],
    ["lasso", "nuc", "even_a.aut"],
    ["lasso", "mupl", "loop_starts_with_a.aut"],
    ["lasso", "minimal", "even_a.aut"],
    ["lasso", "syntactic", "even_a.aut"],
    ["lasso", "nerode", "even_a.aut"],
    ["omega", "gamma", "ab,ab", "a,ba"],
    ["omega", "adm", "even_a.aut"],
    ["omega", "saturated", "even_a.aut"],
    ["omega", "wilke", "even_a.aut"],
    ["omega", "meet", "meet_left.aut", "meet_right.aut"],
    ["laws", "two_state.aut", "even_a.aut"],
]


def resolve(argv):
    return [data(a) if a.endswith(".aut") else a for a in argv]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(a[:2]))
@pytest.mark.parametrize("fmt", [[], ["--json"]], ids=["text", "json"])
def test_output_is_byte_identical(capsys, tmp_path, argv, fmt):
    outs = []
    for i in range(2):
        dot = tmp_path / f"out{i}.dot"
        extra = ["--dot", str(dot)] if argv[0] not in ("laws", "atoms") and argv[:2] != ["omega", "gamma"] else []
        outs.append((run(capsys, *resolve(argv), *fmt, *extra), dot.read_bytes() if dot.exists() else None))
    assert outs[0] == outs[1]


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "automalg.cli", "nuc", data("two_state.aut")],
        capture_output=True, text=True, encoding="utf-8", check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("type: dfa\n")
