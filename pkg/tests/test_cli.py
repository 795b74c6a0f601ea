import json
import math

import pytest

from conftest import DATA, graph_file
from gmzv.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_eval_star(capsys):
    code, rep, _ = run(capsys, "eval", graph_file("gamma1"), "--nmax", 4000)
    assert code == 0
    assert rep["value"] == pytest.approx(2.40411, abs=1e-5)
    assert rep["defaults"] == {"n_max": 2000, "tol": 1e-4, "quad_tol": 1e-8}


def test_eval_edge_k3(capsys):
    _, rep, _ = run(capsys, "eval", graph_file("edge_k3"))
    assert rep["value"] == pytest.approx(1.2020569, abs=1e-6)


def test_eval_hat(capsys):
    _, rep, _ = run(capsys, "eval", graph_file("hat"))
    assert rep["value"] == pytest.approx(1.6734623, abs=1e-4)


def test_reduce_outputs(capsys):
    _, rep, _ = run(capsys, "reduce", graph_file("gamma1"))
    assert rep["text"] == "2 * zeta(1,2)"
    _, rep, _ = run(capsys, "reduce", graph_file("chain4"))
    assert rep["text"] == "1 * zeta(4)"


def test_reduce_polylog(capsys):
    _, rep, _ = run(capsys, "reduce", graph_file("gamma1_112"), "--x", "v2=1/2")
    assert rep["terms"] == 2
    assert {tuple(r["phases"]) for r in rep["combination"]} == {("1/2", "0"), ("1/2", "1/2")}


def test_reduce_non_tree_is_precondition(capsys):
    code, rep, _ = run(capsys, "reduce", graph_file("hat"))
    assert code == 4
    assert rep["error"] == "NotATree"


@pytest.mark.parametrize("name, tol", [("gamma2", "1e-4"), ("gamma1_212", "1e-5")])
def test_verify_passes(capsys, name, tol):
    code, rep, _ = run(capsys, "verify", graph_file(name), "--tol", tol)
    assert code == 0
    assert rep["verdict"] == "PASS"


def test_verify_corrupted_combination(capsys):
    code, rep, _ = run(capsys, "verify", graph_file("gamma1"), "--combination",
                       DATA / "combinations" / "gamma1_corrupted.json")
    assert code == 5
    assert rep["verdict"] == "FAIL"
    assert rep["signed_residual"] == pytest.approx(1.2020569, abs=1e-6)


def test_invalid_graph(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": ["a"], "edges": [{"id": "e", "tail": "a", "head": "a"}],
                               "boundary": ["a"]}))
    code, rep, _ = run(capsys, "eval", bad)
    assert code == 2
    assert rep["error"] == "LoopEdge"


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "eval", tmp_path / "none.json")
    assert code == 2


def test_divergent_is_convergence_failure(capsys, tmp_path):
    g = json.loads(graph_file("edge_k2").read_text())
    g["edges"][0]["k"] = 1
    path = tmp_path / "div.json"
    path.write_text(json.dumps(g))
    code, rep, _ = run(capsys, "eval", path)
    assert code == 3


def test_hecke_transform(capsys):
    code, rep, _ = run(capsys, "hecke", "transform", "--r", 2, "--s", 1, "--x", "1,1")
    assert code == 0
    assert rep["lhs"] == pytest.approx(math.pi / 4, abs=1e-9)
    assert rep["rhs"] == pytest.approx(math.pi / 4, abs=1e-9)
    assert rep["relative_error"] < 1e-6


def test_hecke_transform_rank_one(capsys):
    _, rep, _ = run(capsys, "hecke", "transform", "--r", 1, "--s", 2.5, "--x", "1.5")
    assert rep["lhs"] == rep["rhs"]


def test_hecke_formula(capsys):
    code, rep, _ = run(capsys, "hecke", "formula", "--D", 5, "--s", 2)
    assert code == 0
    assert rep["relative_error"] < 1e-3


def test_reports_are_byte_identical(capsys):
    outs = {run(capsys, "eval", graph_file("gamma1_123"))[2] for _ in range(2)}
    assert len(outs) == 1


def test_hash_depends_on_flags(capsys):
    a = run(capsys, "eval", graph_file("edge_k3"))[1]["input_hash"]
    b = run(capsys, "eval", graph_file("edge_k3"), "--nmax", 3000)[1]["input_hash"]
    assert a != b


def test_twelve_significant_digits(capsys):
    _, rep, out = run(capsys, "eval", graph_file("edge_k3"))
    assert len(repr(rep["value"]).replace(".", "").lstrip("0")) <= 12
    assert list(json.loads(out)) == sorted(json.loads(out))
