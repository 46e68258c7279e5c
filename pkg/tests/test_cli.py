import json
import subprocess
import sys

import numpy as np
import pytest

from mupb.acceptance import hidden_product_vector
from mupb.catalog import FamilySpec, family_basis
from mupb.cli import RunConfig, UsageError, main
from mupb.let import apply_let, random_let
from mupb.linalg import basis_to_literal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_verify_triple_t1(capsys):
    code, rep = run(capsys, "verify-triple", "--label", "T1")
    assert code == 0
    assert rep["passed"] and rep["exact"] and rep["max_deviation"] == 0.0
    assert rep["theorem"] == "T3/T1"


def test_verify_pair_float_backend(capsys):
    code, rep = run(capsys, "verify-pair", "--label", "P3", "--backend", "float-only",
                    "--params", '{"zeta": 0.1, "chi": 0.2, "sigma": 0.5, "tau": 1.0}')
    assert code == 0 and rep["passed"] and not rep["exact"]
    assert rep["theorem"] == "T2/P3"


def test_extend_p0(capsys):
    code, rep = run(capsys, "extend", "--pair", "P0", "--grid", "0.01")
    assert code == 0
    assert rep["count"] == 12 and rep["label_set"] == ["T0", "T1"]
    assert rep["oracle"]["agree"]


def test_classify_scrambled_i0(capsys, tmp_path):
    b = family_basis(FamilySpec("I0", 6))
    s = apply_let([b], random_let([b], np.random.default_rng(9)))[0]
    path = tmp_path / "basis.json"
    path.write_text(json.dumps(basis_to_literal(s)))
    code, rep = run(capsys, "classify", "--input", str(path))
    assert code == 0 and rep["family"] == "I0" and rep["verified"]


def test_bad_arguments_exit_2(capsys, monkeypatch):
    assert main(["search", "--pair", "P0", "--grid", "0.06"]) == 2
    assert main(["verify-pair", "--label", "P7"]) == 2
    assert main(["frobnicate"]) == 2
    monkeypatch.setenv("MUPB_TOL", "0.5")
    assert main(["verify-triple", "--label", "T0"]) == 2
    capsys.readouterr()


def test_flags_override_environment(capsys, monkeypatch):
    monkeypatch.setenv("MUPB_TOL", "0.5")
    code, rep = run(capsys, "verify-triple", "--label", "T0", "--tol", "1e-9")
    assert code == 0


def test_run_config_bounds():
    RunConfig(grid_step=0.05, float_tol=1e-4)
    with pytest.raises(UsageError):
        RunConfig(grid_step=0.051)
    with pytest.raises(UsageError):
        RunConfig(float_tol=0.0)


def test_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["hadamard", "sweep", "--count", "50", "--seed", "7", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_hadamard_commands(capsys, tmp_path):
    code, rep = run(capsys, "hadamard", "decompose", "--seed", "1")
    assert code == 0 and rep["residual"] < 1e-12 and rep["theorem"] == "T5"
    code, rep = run(capsys, "hadamard", "trichotomy", "--seed", "2")
    assert code == 0 and rep["branch"] in ("B0~B1", "B2~B3", "all-four-MU")
    path = tmp_path / "m.json"
    path.write_text(json.dumps([[[1, 0], [0, 0], [0, 0]]] * 3))
    assert main(["hadamard", "decompose", "--input", str(path)]) == 2


def test_ingest(capsys, tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"vectors": [hidden_product_vector().to_json()]}))
    code, rep = run(capsys, "ingest", "--vectors", str(path))
    assert rep["theorem"] == "T4"
    assert rep["vectors"][0]["left"] == "1_y"
    # it becomes |1_y,1_y>: unbiased to the first two bases of each triple, a member of the third
    assert code == 0 and rep["passed"]
    assert rep["triples"]["T0"]["premise_holds"]
    path.write_text(json.dumps({"vectors": [[[1, 0]] + [[0, 0]] * 5]}))
    code, rep = run(capsys, "ingest", "--vectors", str(path))
    assert code == 1 and not rep["passed"]


def test_catalog_listing(capsys):
    code, rep = run(capsys, "catalog")
    assert code == 0 and "P0" in rep["pairs"] and "T1" in rep["triples"]
    code, rep = run(capsys, "catalog", "--family", "I3", "--params", '{"v": [1.0, 0.0], "w": [0.5, 0.2]}')
    assert code == 0 and len(rep["basis"]["states"]) == 6


def test_selftest_subset(capsys):
    code, rep = run(capsys, "selftest", "--only", "1,9")
    assert code == 0 and [c["criterion"] for c in rep["criteria"]] == [1, 9]


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "mupb.cli", "verify-triple", "--label", "T0_4"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["theorem"] == "Prop2/T0_4"
