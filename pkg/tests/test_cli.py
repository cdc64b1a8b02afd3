import json

import numpy as np
import pytest

from optholo.cli import main
from optholo.connection import F_HAT
from optholo.serialize import matrix_from_doc


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_connection_origin_gives_f_hat(capsys):
    code, doc = run(capsys, "connection", "--n", "1", "--point", "0|0")
    assert code == 0
    assert np.array_equal(matrix_from_doc(doc["closed_form"]["xi1"]), F_HAT)
    assert doc["max_deviation"] < 1e-6
    assert doc["defaults"]["cutoff_n1"] == 24 and doc["defaults"]["cutoff_n2"] == 12
    assert doc["defaults"]["step"] == 1e-5
    assert "connection_n1" in doc["defaults"]["tolerances"]


def test_connection_three_controls_numeric_only(capsys):
    code, doc = run(capsys, "connection", "--point", "0.1,0,0.05|0.1,0,0.1", "--cutoff", "5")
    assert code == 0
    assert "closed_form" not in doc and set(doc["numeric"]) == {
        "xi1", "xi2", "xi3", "zeta1", "zeta2", "zeta3", "xibar1", "xibar2", "xibar3",
        "zetabar1", "zetabar2", "zetabar3"}


def test_malformed_point_exit_2(capsys):
    code, doc = run(capsys, "connection", "--n", "2", "--point", "0.1|0.2")
    assert code == 2
    assert doc["error"]["type"] == "ValidationError"
    assert "point dimension mismatch" in doc["error"]["message"]
    code, doc = run(capsys, "connection", "--point", "0.1|0.2,0.3")
    assert code == 2 and "point dimension mismatch" in doc["error"]["message"]


def test_argument_errors_are_validation_errors(capsys):
    code, doc = run(capsys, "connection", "--n", "x")
    assert code == 2 and "error" in doc
    code, doc = run(capsys, "verify", "--tol", "bogus=1")
    assert code == 2
    code, doc = run(capsys, "verify", "--tol", "connection_n1=-1")
    assert code == 2


def test_curvature_n1(capsys, tmp_path):
    out = tmp_path / "c.json"
    code = main(["curvature", "--point", "0.2|0.1", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    zz = matrix_from_doc(doc["closed_form"]["zeta1^zetabar1"])
    assert np.array_equal(zz, np.diag(np.diag(zz))) and np.all(zz.imag == 0)
    assert doc["max_deviation"] <= 1e-5
    assert len(doc["numeric"]) == 6


def test_curvature_n2_numeric_only(capsys):
    code, doc = run(capsys, "curvature", "--point", "0.1,0|0.1,0.05")
    assert code == 0
    assert "closed_form" not in doc
    assert doc["numeric_meta"]["step"] == 1e-4 and doc["step"] == 1e-4
    assert doc["connection_step"] == 1e-5


def test_holonomy_constant_loop(capsys, tmp_path):
    loop = {"kind": "polyline", "samples_per_segment": 8, "vertices": [
        {"xi": [[0.1, 0]], "zeta": [[0, 0]]}, {"xi": [[0.1, 0]], "zeta": [[0, 0]]}]}
    path = tmp_path / "loop.json"
    path.write_text(json.dumps(loop))
    code, doc = run(capsys, "holonomy", "--loop", str(path))
    assert code == 0
    assert np.array_equal(matrix_from_doc(doc["gamma"]), np.eye(4))
    assert doc["unitarity_residual"] == 0 and "warning" not in doc


def test_holonomy_undersampled_warns_exit_0(capsys):
    code, doc = run(capsys, "holonomy", "--loop",
                    '{"kind":"circle","coord":"zeta1","center":[0.1,0],"radius":0.3,"samples":8}')
    assert code == 0
    assert "warning" in doc and doc["refinement_estimate"] > 1e-6


def test_holonomy_bad_loop(capsys):
    code, doc = run(capsys, "holonomy", "--loop", '{"kind":"circle","coord":"zeta1","radius":0.1,"samples":2}')
    assert code == 2
    code, doc = run(capsys, "holonomy")
    assert code == 2


def test_verify_n2_subset_only_runs_n2(capsys):
    code, doc = run(capsys, "verify", "--subset", "n2")
    assert {c["group"] for c in doc["checks"]} == {"n2"}
    # the occupation <= 2 conjugation check does not reach 1e-6 at cutoff 12
    assert doc["failing"] == ["conjugation_n2_vs_brute_force"]
    assert code == 1


def test_verify_under_truncated_reports_failures(capsys):
    code, doc = run(capsys, "verify", "--subset", "n1", "--cutoff", "4", "--zeta-max", "0.5")
    assert code == 1
    assert "connection_closed_n1_vs_numeric" in doc["failing"]
    failed = [c for c in doc["checks"] if c["name"] in doc["failing"]]
    assert all(c["residual"] is None or c["residual"] > c["tolerance"] for c in failed)
    assert doc["holonomy_algebra"]["holonomy_algebra_n1"] == 4
