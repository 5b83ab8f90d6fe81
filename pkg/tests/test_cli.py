import json
import subprocess
import sys

import pytest

from locsym import bench
from locsym.cli import main

EMPTY = "vocab { pred P/1 output } domain = { a } theory { } structure { }\n"


@pytest.fixture
def gc_file(tmp_path):
    path = tmp_path / "gc.lsp"
    path.write_text(bench.running_example_text())
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_analyze(capsys, gc_file):
    code, out = run(capsys, "analyze", gc_file)
    data = json.loads(out)
    assert code == 0
    assert ["C|1", "Color|0"] in data["theory"]
    assert ["Color|0", "C#1|1"] in data["decomposed"]
    assert data["theory_star"][2] == "! x3 : C#1(Color(x3))."


def test_detect_reports_blocks(capsys, gc_file, tmp_path):
    report = tmp_path / "r.json"
    code, out = run(capsys, "detect", gc_file, "--no-timings", "--json", str(report))
    data = json.loads(out)
    assert code == 0
    assert json.loads(report.read_text()) == data
    colours = next(b for b in data["blocks"] if b["A"] == ["Color|0", "C#1|1"])
    assert colours["interchangeable"] == [["t", "u", "v", "w"], ["r", "g", "b"]]
    assert not colours["dpg_built"]
    assert "timings" not in data and data["schema"] == 1


def test_detect_is_deterministic(capsys, tmp_path):
    small = tmp_path / "cycle.lsp"
    small.write_text(bench.color_cycle_text(4, 2))
    _, first = run(capsys, "detect", str(small), "--no-timings", "--dpg", "--verify-oracle", "--positions", "Color|1,Edge#1|1,Edge#1|2")
    _, second = run(capsys, "detect", str(small), "--no-timings", "--dpg", "--verify-oracle", "--positions", "Color|1,Edge#1|1,Edge#1|2")
    assert first == second
    block = json.loads(first)["blocks"][0]
    assert block["dpg_built"] and block["complete_search"]
    assert block["generators"] == ["(v1 v2 v3 v4)", "(c1 c2)"]
    assert block["verified"] is True


def test_custom_order(capsys, gc_file, tmp_path):
    order = tmp_path / "order.txt"
    order.write_text("b g r w v u t\n")
    _, out = run(capsys, "detect", gc_file, "--no-timings", "--order", str(order), "--positions", "C#1|1,Color|0")
    assert json.loads(out)["blocks"][0]["interchangeable"] == [["b", "g", "r"], ["w", "v", "u", "t"]]


def test_ground_and_break(capsys, gc_file, tmp_path):
    code, plain = run(capsys, "ground", gc_file)
    assert code == 0 and plain.splitlines()[0] == "c 1 Color(t)=t"
    catalog = tmp_path / "cat.json"
    out = tmp_path / "b.cnf"
    code, _ = run(capsys, "break", gc_file, "-o", str(out), "--catalog", str(catalog))
    assert code == 0
    header = next(l for l in out.read_text().splitlines() if l.startswith("p cnf"))
    assert int(header.split()[3]) > int(next(l for l in plain.splitlines() if l.startswith("p cnf")).split()[3])
    assert json.loads(catalog.read_text())


def test_solve(capsys, gc_file, tmp_path):
    code, out = run(capsys, "solve", gc_file, "--break", "both")
    assert code == 0
    assert out.splitlines()[0] == "s SATISFIABLE"
    assert out.splitlines()[1].startswith("v ")
    empty = tmp_path / "e.lsp"
    empty.write_text(EMPTY)
    code, out = run(capsys, "solve", str(empty))
    assert code == 0 and out.startswith("s SATISFIABLE")
    pigeons = tmp_path / "p.lsp"
    pigeons.write_text(bench.pigeonhole_text(5))
    code, out = run(capsys, "solve", str(pigeons))
    assert code == 0 and out.strip() == "s UNSATISFIABLE"


def test_verify(capsys, tmp_path):
    small = tmp_path / "cycle.lsp"
    small.write_text(bench.color_cycle_text(4, 2))
    code, out = run(capsys, "verify", str(small), "--positions", "C#1|1,Color|0", "--perm", "(c1 c2)")
    assert code == 0
    assert json.loads(out) == {"A": ["C#1|1", "Color|0"], "perm": "(c1 c2)", "symmetry": True}
    _, out = run(capsys, "verify", str(small), "--positions", "C#1|1,Color|0", "--perm", "(v1 c1)")
    assert json.loads(out)["symmetry"] is False


def test_bench(capsys, tmp_path):
    report = tmp_path / "bench.json"
    code, out = run(capsys, "bench", "--family", "pigeons", "--max", "6", "--json", str(report))
    assert code == 0
    assert out.splitlines()[-1] == "solved 5/5"
    rows = json.loads(report.read_text())["rows"]
    assert [r["n"] for r in rows] == [2, 3, 4, 5, 6]
    assert all(r["status"] == "UNSAT" and r["detection_time"] < 0.1 for r in rows)


def test_stage_errors(capsys, tmp_path):
    bad = tmp_path / "bad.lsp"
    bad.write_text("vocab { pred P/1 output } domain = { a } theory { ! x : Z(x). } structure { }")
    code, out = run(capsys, "detect", str(bad))
    assert code == 1
    err = json.loads(out)
    assert err["stage"] == "parse" and err["type"] == "ParseError"
    code, out = run(capsys, "detect", str(tmp_path / "missing.lsp"))
    assert code == 1 and json.loads(out)["stage"] == "parse"


def test_unknown_command_exit_code():
    proc = subprocess.run([sys.executable, "-m", "locsym.cli", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_budget_limited_solve(capsys, tmp_path):
    pigeons = tmp_path / "p.lsp"
    pigeons.write_text(bench.pigeonhole_text(9))
    code, out = run(capsys, "solve", str(pigeons), "--break", "none", "--max-conflicts", "5")
    assert code == 0 and out.strip() == "s UNKNOWN"
