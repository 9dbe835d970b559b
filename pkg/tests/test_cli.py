import json
import subprocess
import sys

import numpy as np
import pytest

from pgfermi import cli
from pgfermi.fermion import shift_matrix
from pgfermi.numerics import matrix_to_json


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_ex2_passes(capsys):
    params = '{"alpha":1,"beta":1,"gamma":1,"delta":1}'
    code, out, _ = run(["verify", "--example", "ex2", "--params", params], capsys)
    assert code == 0 and "overall: PASS" in out


def test_verify_hermitian_json(capsys):
    code, out, _ = run(["verify", "--hermitian", "--n", "3", "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["overall"]
    assert {"name", "residual", "threshold", "pass", "paper_anchor"} <= set(rep["checks"][0])


def test_verify_bad_pair_exits_1(tmp_path, capsys):
    A = shift_matrix(3)
    f = tmp_path / "pair.json"
    f.write_text(json.dumps({"n": 2, "a": matrix_to_json(A), "b": matrix_to_json(2 * A.T)}))
    code, _, err = run(["verify", "--input", str(f)], capsys)
    assert code == 1 and "pf_relation" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--example", "ex1", "--params", '{"alpha":0}'],
    ["verify", "--example", "ex2", "--params", "{not json"],
    ["verify", "--input", "/nonexistent.json"],
    ["verify", "--hermitian", "--n", "40"],
    ["gk", "--n", "0"],
    ["factorize", "--eps", "[0, 1, 1]"],
])
def test_input_errors_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_argparse_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--format", "xml"])
    assert exc.value.code == 2


def test_tolerance_from_env(monkeypatch, capsys):
    monkeypatch.setenv("PGFERMI_TOL", "1e-6")
    code, out, _ = run(["verify", "--hermitian", "--n", "2", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["checks"][0]["threshold"] == pytest.approx(2e-6)


@pytest.mark.parametrize("n, line", [(1, "0 1"), (2, "-1 2 1"), (3, "0 1 0 1")])
def test_gk_table(n, line, capsys):
    code, out, _ = run(["gk", "--n", str(n)], capsys)
    assert code == 0 and f"n= {n}: {line}" in out


def test_example_and_cs(capsys):
    code, out, _ = run(["example", "--example", "ex3", "--n", "3", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["n"] == 3
    code, out, _ = run(["cs", "--example", "ex1", "--side", "right"], capsys)
    assert code == 0 and "resolution of identity (right)" in out


def test_factorize_command(tmp_path, capsys):
    code, out, _ = run(["factorize", "--eps", "[2, 3, 6]", "--format", "json"], capsys)
    res = json.loads(out)
    assert code == 0 and res["shift"] == [2.0, 0.0]
    assert np.allclose([complex(*r) for r in res["pf_coefficients"]], [1, 1])
    f = tmp_path / "fl.json"
    f.write_text(json.dumps({"eps": [0, 1, 4],
                             "Psi": matrix_to_json([[1, 1, 0], [0, 1, 0], [0, 0, 1]])}))
    assert run(["factorize", "--input", str(f)], capsys)[0] == 0


def test_grid_passes_and_is_deterministic(capsys):
    argv = ["grid", "--example", "ex1", "--samples", "100", "--seed", "7", "--format", "json"]
    code, first, _ = run(argv + ["--jobs", "2"], capsys)
    assert code == 0 and json.loads(first)["counts"]["pass"] == 100
    _, second, _ = run(argv + ["--jobs", "1"], capsys)
    assert first == second


def test_grid_rejection_exits_2(capsys):
    code, out, _ = run(["grid", "--example", "ex3", "--samples", "4", "--format", "json",
                        "--params", '{"alphas": [1, 0, 1]}'], capsys)
    assert code == 2 and json.loads(out)["counts"]["rejected"] == 4


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pgfermi", "gk", "--n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "-1 2 1" in proc.stdout
