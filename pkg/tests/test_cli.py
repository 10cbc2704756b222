import json
import subprocess
import sys

import pytest

from morsecx import cli
from morsecx.cells import Report

EXIT_OK, EXIT_INPUT, EXIT_INTEGRITY = 0, 2, 3


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def k121_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cx") / "k121.json"
    assert run("complex", 1, 2, 1, "--out", path) == EXIT_OK
    return path


@pytest.fixture(scope="module")
def k132_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cx") / "k132.json"
    assert run("complex", "--p", 1, "--q", 3, "--r", 2, "--out", path) == EXIT_OK
    return path


# permutohedron --------------------------------------------------------------

@pytest.mark.parametrize("q,n", [(3, 13), (1, 1)])
def test_permutohedron(tmp_path, q, n):
    out = tmp_path / "p.json"
    assert run("permutohedron", "--q", q, "--out", out) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["q"] == q and len(data["faces"]) == n


@pytest.mark.parametrize("argv", [["permutohedron", "0"], ["permutohedron"],
                                  ["permutohedron", "--q", "x"], ["permutohedron", "2", "--q", "3"]])
def test_permutohedron_bad_input(argv):
    assert cli.main(argv) == EXIT_INPUT


# complex --------------------------------------------------------------------

def test_complex_check_k121(tmp_path, capsys):
    out = tmp_path / "k.json"
    assert run("complex", "--p", 1, "--q", 2, "--r", 1, "--check", "--out", out) == EXIT_OK
    data = json.loads(out.read_text())
    assert len(data["cells"]) == 3
    log = capsys.readouterr().out
    assert log.count("PASS") == 4 and "FAIL" not in log


def test_complex_check_k132(tmp_path):
    assert run("complex", 1, 3, 2, "--check", "--out", tmp_path / "k.json") == EXIT_OK


@pytest.mark.parametrize("argv", [["complex", "--p", "1", "--q", "1", "--r", "1"],
                                  ["complex", "1", "2"], ["complex", "0", "2", "1"],
                                  ["complex", "1", "2", "1", "--p", "2"]])
def test_complex_bad_input(argv, capsys):
    assert cli.main(argv) == EXIT_INPUT
    assert "error" in capsys.readouterr().err


def test_complex_failed_check_exits_3(monkeypatch, tmp_path):
    def failing(cx):
        rep = Report("regularity")
        rep.fail("synthetic failure")
        return [rep]
    monkeypatch.setattr(cli, "run_checks", failing)
    assert run("complex", 1, 2, 1, "--check", "--out", tmp_path / "k.json") == EXIT_INTEGRITY


def test_complex_stdout_is_json(capsys):
    assert run("complex", 1, 1, 2) == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["params"]["genus"] == 0
    assert "1 cells" in captured.err


def test_dot_output(tmp_path):
    dot = tmp_path / "k.dot"
    assert run("complex", 1, 2, 1, "--out", tmp_path / "k.json", "--dot", dot) == EXIT_OK
    assert dot.read_text().count(" -- ") == 1


# topology -------------------------------------------------------------------

def _topology(kind, path, tmp_path, *extra):
    out = tmp_path / f"{kind}.json"
    assert run(*extra, "topology", kind, "--in", path, "--out", out) == EXIT_OK
    return json.loads(out.read_text())


def test_topology_k132_homology(k132_file, tmp_path):
    assert _topology("homology", k132_file, tmp_path) == {
        "betti": [1, 0, 7], "torsion": [[], [], []]}


def test_topology_k121(k121_file, tmp_path):
    assert _topology("homology", k121_file, tmp_path)["betti"] == [1, 0]
    assert _topology("pi1", k121_file, tmp_path)["pi1"]["trivial"] is True
    assert _topology("rank", k121_file, tmp_path)["rank_report"]["bk_bound"] == 4


def test_topology_seeded_relabel_check(k121_file, tmp_path):
    rep = _topology("homology", k121_file, tmp_path, "--seed", 7)
    assert rep["relabel_check"] == {"seed": 7, "agrees": True}


def test_topology_kind_flag(k121_file, tmp_path):
    out = tmp_path / "r.json"
    assert run("topology", "--kind", "rank", "--in", k121_file, "--out", out) == EXIT_OK
    assert json.loads(out.read_text())["rank_report"]["V"] == 2


def test_topology_irregular_exits_3(k121_file, tmp_path):
    data = json.loads(k121_file.read_text())
    data["boundary"] = data["boundary"][:1]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run("topology", "homology", "--in", bad) == EXIT_INTEGRITY


@pytest.mark.parametrize("content", ["not json", '{"cells": []}', '{"params": {"p": 1}}'])
def test_topology_bad_file(tmp_path, content):
    bad = tmp_path / "bad.json"
    bad.write_text(content)
    assert run("topology", "homology", "--in", bad) == EXIT_INPUT


def test_topology_missing_file(tmp_path):
    assert run("topology", "homology", "--in", tmp_path / "missing.json") == EXIT_INPUT


# invariants -----------------------------------------------------------------

def _invariants(tmp_path, setup, word):
    s, w, out = tmp_path / "s.json", tmp_path / "w.json", tmp_path / "o.json"
    s.write_text(json.dumps(setup))
    w.write_text(json.dumps(word))
    code = run("invariants", "--setup", s, "--word", w, "--out", out)
    return code, (json.loads(out.read_text()) if code == EXIT_OK else None)


def test_invariants_examples(tmp_path):
    setup = {"p": 1, "q": 2, "r": 1}
    code, rep = _invariants(tmp_path, setup, [{"curve": "s1q", "power": 1}])
    assert code == EXIT_OK and rep["B_abs"] == [1]
    code, rep = _invariants(tmp_path, setup, [])
    assert rep["B"] == [0] and rep["B_abs"] == [0]
    code, rep = _invariants(tmp_path, setup, [{"curve": "s3q", "power": 1}])
    assert rep["B"] == [1]
    assert rep["curves"][0]["obstruction"]["verdict"] == "not in Gamma_f"


@pytest.mark.parametrize("setup,word", [
    ({"p": 1, "q": 2}, []),
    ({"p": 1, "q": 2, "r": 1}, [{"curve": "zz", "power": 1}]),
    ({"p": 1, "q": 2, "r": 1, "curves": [{"name": "a", "enclosed": []}]}, []),
    ({"p": 1, "q": 2, "r": 1}, {"letters": []}),
])
def test_invariants_schema_errors(tmp_path, setup, word):
    code, _ = _invariants(tmp_path, setup, word)
    assert code == EXIT_INPUT


def test_invariants_needs_both_files():
    assert run("invariants", "--word", "w.json") == EXIT_INPUT


def test_no_subcommand():
    assert cli.main([]) == EXIT_INPUT


# processes ------------------------------------------------------------------

def _proc(*argv, cwd):
    return subprocess.run([sys.executable, "-m", "morsecx", *map(str, argv)],
                          capture_output=True, cwd=cwd)


def test_outputs_are_byte_identical(tmp_path):
    a = _proc("complex", 1, 3, 2, cwd=tmp_path)
    b = _proc("complex", 1, 3, 2, cwd=tmp_path)
    assert a.returncode == b.returncode == EXIT_OK
    assert a.stdout == b.stdout and a.stdout.endswith(b"\n")
    (tmp_path / "k.json").write_bytes(a.stdout)
    h1 = _proc("topology", "homology", "--in", "k.json", cwd=tmp_path)
    h2 = _proc("topology", "homology", "--in", "k.json", cwd=tmp_path)
    assert h1.stdout == h2.stdout == b'{"betti": [1, 0, 7], "torsion": [[], [], []]}\n'


def test_process_exit_codes(tmp_path):
    assert _proc("complex", 1, 1, 1, cwd=tmp_path).returncode == EXIT_INPUT
    assert _proc("permutohedron", 0, cwd=tmp_path).returncode == EXIT_INPUT
    assert _proc("permutohedron", 2, cwd=tmp_path).returncode == EXIT_OK
