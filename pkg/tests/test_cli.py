from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conesheaf.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, main

from conftest import fixture_path


def run(capsys, *argv):
    code = main([*argv, "--no-timing"])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_cone_analyze_ex4to3(capsys):
    code, rep, _ = run(capsys, "cone-analyze", fixture_path("ex4to3.json"), "--trials", "50")
    v = rep["verdicts"]
    assert code == EXIT_OK
    assert v["effective_monic"] == "YES" and v["directed"] == "NOT_DIRECTED"
    assert v["malcev"] is True and v["jointly_injective"] is True
    assert v["guarantee"] == "UNKNOWN"
    assert rep["schema"] == "conesheaf/1" and rep["command"] == "cone-analyze"
    assert len(rep["inputs"]["files"]["cone"]["sha256"]) == 64
    assert "wall_time" not in rep


def test_cone_analyze_pushed(capsys):
    code, rep, _ = run(capsys, "cone-analyze", fixture_path("ex4to3_pushed.json"))
    assert code == EXIT_OK
    assert rep["verdicts"]["effective_monic"] == "NO"
    assert rep["witnesses"]["effective_monic"]["family"] == ["3", "0"]


def test_cone_analyze_facecone(capsys):
    code, rep, _ = run(capsys, "cone-analyze", fixture_path("facecone.json"))
    assert code == EXIT_OK
    assert rep["verdicts"]["directed"] == "DIRECTED" and rep["verdicts"]["guarantee"] == "GUARANTEED"


def test_cone_analyze_budget(capsys):
    code, rep, _ = run(capsys, "cone-analyze", fixture_path("three_surj.json"), "--budget", "1")
    assert code == EXIT_BUDGET
    assert rep["verdicts"]["effective_monic"] == "BUDGET"


@pytest.mark.parametrize(
    "cone,quotient,status",
    [
        ("ex4to3.json", "ex4to3_merge.json", "NONE"),
        ("facecone.json", "digitsum.json", "NONE"),
        ("ex4to3.json", "identity_quotient.json", "SELF"),
    ],
)
def test_cone_refine(capsys, cone, quotient, status):
    code, rep, _ = run(capsys, "cone-refine", fixture_path(cone), "--quotient", fixture_path(quotient))
    assert code == EXIT_OK and rep["verdicts"]["refinement"] == status


def test_mat_search(capsys):
    code, rep, _ = run(capsys, "mat-search", fixture_path("prodcone22.json"), "--dim", "2")
    assert code == EXIT_OK and rep["verdicts"]["witness_found"]
    assert rep["witnesses"]["noncommuting_family"]["trial"] == 0
    code, rep, _ = run(capsys, "mat-search", fixture_path("facecone.json"), "--dim", "2", "--trials", "300")
    assert not rep["verdicts"]["witness_found"]


def test_mat_check(capsys):
    _, rep, _ = run(capsys, "mat-check", fixture_path("pauli.json"))
    assert rep["verdicts"]["joint_diagonalization"]["status"] == "NONCOMMUTING"
    _, rep, _ = run(capsys, "mat-check", fixture_path("prodcone_family.json"))
    assert rep["verdicts"]["compatible"] is True and rep["verdicts"]["lift"] == "NONCOMMUTING"


def test_fc_apply_identity_table_echoes(capsys):
    _, rep, _ = run(capsys, "fc-apply", fixture_path("fc_identity_table.json"), "--fn", "table")
    doc = json.load(open(fixture_path("fc_identity_table.json")))
    assert rep["verdicts"]["result"] == doc["matrix"]
    _, rep, _ = run(capsys, "fc-apply", fixture_path("fc_identity_table.json"), "--op", "add")
    assert rep["verdicts"]["result"]["entries"][1][1] == [6.0, 0.0]


def test_group_commands(capsys):
    assert run(capsys, "group-zeta", "ab")[1]["verdicts"]["zeta"] == 1
    assert run(capsys, "group-zeta", "a")[1]["verdicts"]["zeta"] == 0
    code, rep, _ = run(capsys, "group-explore", fixture_path("z2.json"))
    assert code == EXIT_OK
    assert rep["verdicts"]["almost_endomorphisms"] == 2
    assert all(m["flag"] == "IS_GROUP_HOM" for m in rep["witnesses"]["maps"])
    _, rep, _ = run(capsys, "group-verify", "--samples", "200")
    assert rep["verdicts"]["passed"]


def test_group_explore_budget(capsys):
    code, rep, _ = run(capsys, "group-explore", fixture_path("q8.json"), "--budget", "10")
    assert code == EXIT_BUDGET and rep["verdicts"]["status"] == "BUDGET"


def test_ks_search(capsys):
    code, rep, _ = run(capsys, "ks-search", fixture_path("ks18.json"))
    assert code == EXIT_OK and rep["verdicts"]["status"] == "UNSAT"
    code, rep, _ = run(capsys, "ks-search", fixture_path("ks18.json"), "--budget", "2")
    assert code == EXIT_BUDGET


@pytest.mark.parametrize(
    "argv",
    [
        ["group-zeta", "abx"],
        ["cone-analyze", "/nonexistent/cone.json"],
        ["group-explore", fixture_path("ex4to3.json")],
        ["cone-analyze", fixture_path("z2.json")],
        ["mat-check", fixture_path("ex4to3.json")],
        ["fc-apply", fixture_path("pauli.json")],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, rep, _ = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert "error" in rep


def test_malformed_json_exit_2(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"apex": ')
    code, rep, _ = run(capsys, "cone-analyze", str(p))
    assert code == EXIT_INPUT


def test_wall_time_present_by_default(capsys):
    main(["group-zeta", "ab"])
    assert "wall_time" in json.loads(capsys.readouterr().out)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "conesheaf", "group-zeta", "abab", "--no-timing"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdicts"]["zeta"] == 2
