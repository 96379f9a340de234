import json

import numpy as np

from homscat.cli import main
from homscat.matkit import matrix_exponential, max_abs, standard_symplectic_form
from homscat.models import ModelSpec


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


def write_spec(tmp_path, spec, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(spec.to_json_dict()))
    return str(path)


def write_matrix(tmp_path, M, name="sigma.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"dim": M.shape[0], "data": [float(x) for x in M.ravel()]}))
    return str(path)


class TestDemoIntegrable:
    def test_identity_scattering(self, capsys):
        code, payload, _ = run(capsys, ["demo-integrable", "--l", "2"])
        assert code == 0
        assert payload["pass"] is True
        assert payload["max_deviation_from_identity"] <= 1e-8

    def test_custom_omega(self, capsys):
        code, payload, _ = run(capsys, ["demo-integrable", "--l", "2", "--omega", "1,3.5"])
        assert code == 0
        assert payload["omega"] == [1.0, 3.5]


class TestMajorizeCommand:
    def test_holds(self, capsys):
        code, payload, _ = run(capsys, ["majorize", "--a", "1,1,-1,-1", "--b", "3,-1,-1,-1"])
        assert code == 0
        assert payload["holds"] is True
        assert payload["partial_sum_gaps"] == [2.0, 0.0, 0.0]

    def test_reports_failure_without_error(self, capsys):
        code, payload, _ = run(capsys, ["majorize", "--a", "2,0", "--b", "1,1"])
        assert code == 0
        assert payload["holds"] is False


class TestMirskyCommand:
    def test_construction(self, capsys):
        code, payload, _ = run(capsys, ["mirsky", "--diag", "1,-1", "--eigs", "2,-2"])
        assert code == 0
        assert payload["diag_error"] <= 1e-10
        assert payload["eigenvalue_error"] <= 1e-8

    def test_non_majorized_exits_2(self, capsys):
        code, payload, err = run(capsys, ["mirsky", "--diag", "2,0", "--eigs", "1,1"])
        assert code == 2
        assert payload is None
        assert "error" in json.loads(err)


class TestRealizeCommand:
    def test_signature(self, capsys):
        code, payload, _ = run(
            capsys, ["realize", "--l", "2", "--m", "3", "--omega", "1,2", "--eps", "0.01"]
        )
        assert code == 0
        sig = payload["achieved"]
        assert (sig["n_pos"], sig["n_neg"], sig["n_zero"]) == (3, 1, 0)

    def test_out_of_range_m(self, capsys):
        code, _, err = run(capsys, ["realize", "--l", "2", "--m", "0", "--omega", "1,2", "--eps", "0.01"])
        assert code == 2
        assert "error" in json.loads(err)

    def test_deterministic_payload(self, capsys):
        argv = ["realize", "--l", "1", "--m", "1", "--omega", "1", "--eps", "0.01"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        first.pop("timestamp")
        second.pop("timestamp")
        assert first == second


class TestIndefiniteCommand:
    def test_ensemble(self, capsys):
        code, payload, _ = run(
            capsys,
            ["indefinite", "--l", "1", "--omega", "1", "--trials", "50", "--seed", "3"],
        )
        assert code == 0
        assert payload["definite_positive"] == 0
        assert payload["definite_negative"] == 0
        assert payload["pass"] is True

    def test_omega_mismatch(self, capsys):
        code, _, err = run(
            capsys, ["indefinite", "--l", "2", "--omega", "1", "--trials", "5", "--seed", "3"]
        )
        assert code == 2
        assert "error" in json.loads(err)


class TestScatterCommand:
    def test_integrable_spec(self, capsys, tmp_path):
        spec = ModelSpec(l=1, n_hyp=1, omega=[1.0], eps=0.0, T_support=2.0)
        code, payload, _ = run(capsys, ["scatter", "--spec", write_spec(tmp_path, spec)])
        assert code == 0
        sigma = np.array(payload["sigma"]["data"]).reshape(2, 2)
        assert max_abs(sigma - np.eye(2)) <= 1e-8
        assert payload["symplectic_defect"] <= 1e-8

    def test_perturbed_spec(self, capsys, tmp_path):
        rng = np.random.default_rng(1)
        C = rng.standard_normal((2, 2))
        C = 0.5 * (C + C.T)
        spec = ModelSpec(l=1, n_hyp=1, omega=[1.0], eps=0.05, C=C, T_support=2.5)
        code, payload, _ = run(capsys, ["scatter", "--spec", write_spec(tmp_path, spec)])
        assert code == 0
        sigma = np.array(payload["sigma"]["data"]).reshape(2, 2)
        expected = matrix_exponential(-0.05 * standard_symplectic_form(1) @ C)
        assert max_abs(sigma - expected) <= 1e-7

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run(capsys, ["scatter", "--spec", str(path)])
        assert code == 2
        message = json.loads(err)
        assert "error" in message and "\n" not in err.strip()

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, ["scatter", "--spec", str(tmp_path / "nope.json")])
        assert code == 2
        assert "error" in json.loads(err)


class TestClassifyCommand:
    def test_exponential_sigma(self, capsys, tmp_path):
        rng = np.random.default_rng(2)
        B = rng.standard_normal((4, 4))
        B = 0.5 * (B + B.T)
        sigma = matrix_exponential(-0.01 * standard_symplectic_form(2) @ B)
        code, payload, _ = run(
            capsys, ["classify", "--sigma", write_matrix(tmp_path, sigma), "--omega", "1,2"]
        )
        assert code == 0
        sig = payload["signature"]
        assert sig["n_pos"] + sig["n_neg"] + sig["n_zero"] == 4
        assert payload["hessian"]["dim"] == 4

    def test_nonsymplectic_rejected(self, capsys, tmp_path):
        code, _, err = run(
            capsys,
            ["classify", "--sigma", write_matrix(tmp_path, 2.0 * np.eye(2)), "--omega", "1"],
        )
        assert code == 2
        assert "error" in json.loads(err)


class TestReversibleCommand:
    def test_reversible_model(self, capsys, tmp_path):
        rng = np.random.default_rng(5)
        blocks = [0.5 * (lambda A: A + A.T)(rng.standard_normal((2, 2))) for _ in range(2)]
        C = np.zeros((4, 4))
        C[:2, :2], C[2:, 2:] = blocks
        spec = ModelSpec(l=2, n_hyp=1, omega=[1.0, 2.0], eps=0.05, C=C, T_support=2.5)
        code, payload, _ = run(capsys, ["reversible", "--spec", write_spec(tmp_path, spec)])
        assert code == 0
        assert payload["reversibility"]["passed"] is True
        sig = payload["signature"]
        assert (sig["n_pos"], sig["n_neg"], sig["n_zero"]) == (2, 2, 0)
        assert payload["eigenvalue_pairing_defect"] <= 1e-7

    def test_nonreversible_model_fails(self, capsys, tmp_path):
        C = np.zeros((2, 2))
        C[0, 1] = C[1, 0] = 1.0  # couples the reversal eigenspaces
        spec = ModelSpec(l=1, n_hyp=1, omega=[1.0], eps=0.3, C=C, T_support=2.0)
        code, payload, _ = run(capsys, ["reversible", "--spec", write_spec(tmp_path, spec)])
        assert code == 1
        assert payload["pass"] is False
        assert payload["reversibility"]["passed"] is False


class TestCliPlumbing:
    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, ["frobnicate"])
        assert code == 2
        assert "error" in json.loads(err)

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code, payload, _ = run(
            capsys, ["majorize", "--a", "1,-1", "--b", "2,-2", "--out", str(out)]
        )
        assert code == 0
        assert payload is None  # payload goes to the file, not stdout
        doc = json.loads(out.read_text())
        assert doc["holds"] is True
        assert "timestamp" in doc

    def test_bad_number_list(self, capsys):
        code, _, err = run(capsys, ["majorize", "--a", "1,spam", "--b", "1,1"])
        assert code == 2
        assert "error" in json.loads(err)
