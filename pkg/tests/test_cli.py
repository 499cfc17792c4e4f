import csv
import json
import os
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from calabi_ansatz.cli import main
from calabi_ansatz.exact import PiGraded, enclose, from_json
from calabi_ansatz.scenario import Scenario, constants


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants_even2(capsys):
    code, out, _ = run(capsys, "constants", "--case", "even", "--k", "2")
    assert code == 0
    assert "alpha0/alpha1 = 32*pi" in out
    assert "C_2 = 52*(2pi)^3" in out


def test_constants_odd3(capsys):
    code, out, _ = run(capsys, "constants", "--case", "odd", "--k", "3")
    assert code == 0 and "(1216/21)*(2pi)^2" in out


def test_constants_general_k1_interval(capsys):
    code, out, _ = run(capsys, "constants", "--case", "general", "--k", "1", "--m1", "0", "--m2", "1", "--json")
    assert code == 0
    d = json.loads(out)
    iv = from_json(d["alpha0_over_alpha1"]["enclosure"])
    assert iv.width <= Fraction(1, 10**30)
    assert abs(float(iv.mid) - 2.6038) < 5e-4


def test_constants_json_round_trip(capsys):
    code, out, _ = run(capsys, "constants", "--case", "general", "--k", "3", "--m1", "1", "--m2", "2", "--json")
    d = json.loads(out)
    s = Scenario.from_json(d["scenario"])
    cs = constants(s)
    assert from_json(d["alpha0_over_alpha1"]["exact"]) == cs.ratio
    assert from_json(d["C_tilde"]["exact"]) == cs.C_tilde
    assert from_json(d["a_k"]["exact"]) == cs.a_k
    assert from_json(d["R_k"]["exact"]) == cs.R_k


def test_precision_flag_and_env(capsys, monkeypatch):
    monkeypatch.setenv("ANSATZ_PRECISION_EXP", "8")
    _, out, _ = run(capsys, "constants", "--case", "general", "--k", "1", "--json")
    iv = from_json(json.loads(out)["R_k"]["enclosure"])
    assert Fraction(1, 10**9) < iv.width <= Fraction(1, 10**8)
    _, out, _ = run(capsys, "constants", "--case", "general", "--k", "1", "--json", "--precision-exp", "40")
    assert from_json(json.loads(out)["R_k"]["enclosure"]).width <= Fraction(1, 10**40)
    monkeypatch.setenv("ANSATZ_PRECISION_EXP", "zero")
    code, _, err = run(capsys, "constants")
    assert code == 1 and "ANSATZ_PRECISION_EXP" in err


def test_solve_even2(capsys):
    code, out, _ = run(capsys, "solve", "--case", "even", "--k", "2")
    assert code == 0
    assert "Solvable" in out and "phi tau-coefficients: [0, 1, -1/2]" in out
    code, out, _ = run(capsys, "solve", "--case", "even", "--k", "2", "--json")
    d = json.loads(out)
    assert d["verdict"] == "Solvable"
    coeffs = [from_json(c) for c in d["profile"]["phi_tau_coefficients"]]
    assert coeffs == [0, 1, Fraction(-1, 2)]
    assert from_json(d["alpha0_over_alpha1"]) == PiGraded(16, 1)


def test_solve_no_solution(capsys):
    code, out, _ = run(capsys, "solve", "--case", "general", "--k", "5", "--m1", "0", "--m2", "1")
    assert code == 2
    assert "NoSolution" in out and "witness bracket" in out
    code, out, _ = run(capsys, "solve", "--case", "general", "--k", "5", "--json")
    d = json.loads(out)
    lo, hi = Fraction(d["positivity"]["witness_u"]["lo"]), Fraction(d["positivity"]["witness_u"]["hi"])
    assert lo * lo <= Fraction(3655, 441) <= hi * hi


@pytest.mark.parametrize("argv", [
    ["solve", "--case", "even", "--k", "3"],
    ["solve", "--case", "odd", "--k", "2"],
    ["solve", "--case", "general", "--k", "2", "--m1", "0", "--m2", "0"],
    ["solve", "--alpha1", "-1"],
    ["solve", "--alpha1", "abc"],
    ["solve", "--nodes", "2"],
    ["solve", "--eps", "3/2"],
    ["solve", "--bogus"],
    ["frobnicate"],
    ["verify"],
    ["verify", "no-such-check"],
    ["sweep", "--k-min", "4", "--k-max", "2"],
])
def test_usage_errors_exit_1(capsys, argv):
    code = None
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_solve_csv(capsys, tmp_path):
    path = tmp_path / "odd3.csv"
    code, out, _ = run(capsys, "solve", "--case", "odd", "--k", "3", "--csv", str(path), "--nodes", "65")
    assert code == 0 and "reconstruction residual" in out
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["tau", "phi", "s", "F", "f", "rho", "rho_rel_dev"]
    assert len(rows) == 66
    assert max(abs(float(r[6])) for r in rows[1:]) < 1e-8


def test_solve_json_reconstruction(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "--case", "even", "--k", "4", "--json", "--csv", str(tmp_path / "x.csv"))
    rec = json.loads(out)["reconstruction"]
    assert rec["pde_residual"] < 1e-8 and rec["nodes"] == 512


def test_verify_selected(capsys):
    code, out, _ = run(capsys, "verify", "R-table", "alpha0-identity")
    assert code == 0
    assert "2/2 checks passed" in out and "R_3 = 5/63" in out


def test_verify_acceptance_id_flag(capsys):
    code, out, _ = run(capsys, "verify", "--acceptance-id", "R-table", "--acceptance-id", "no-solution")
    assert code == 0 and "2/2 checks passed" in out


def test_verify_all_json(capsys):
    code, out, _ = run(capsys, "verify", "--all", "--json")
    d = json.loads(out)
    assert code == 0 and d["passed"] and len(d["checks"]) == 12
    assert all(c["seconds"] < c["budget_seconds"] for c in d["checks"])


def test_sweep(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", "--case", "general", "--k-min", "1", "--k-max", "6", "--json", "--csv", str(path))
    assert code == 0
    rows = json.loads(out)
    assert [r["verdict"] for r in rows] == ["Solvable"] * 4 + ["NoSolution"] * 2
    assert len(list(csv.reader(path.open()))) == 7
    code, out, _ = run(capsys, "sweep", "--case", "even", "--k-max", "8")
    assert [line.split()[2] for line in out.splitlines()] == ["Solvable", "Solvable", "NoSolution", "NoSolution"]


def test_sweep_parallel_order(capsys):
    _, serial, _ = run(capsys, "sweep", "--case", "odd", "--k-max", "9", "--json")
    _, parallel, _ = run(capsys, "sweep", "--case", "odd", "--k-max", "9", "--json", "--jobs", "3")
    assert serial == parallel


def test_plot_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["plot", "--case", "even", "--k", "2", "--out", str(a)]) == 0
    assert main(["plot", "--case", "even", "--k", "2", "--out", str(b)]) == 0
    svg = a.read_bytes()
    assert svg == b.read_bytes()
    assert b'viewBox="0 0 800 500"' in svg and b"phi(tau)" in svg and b"s(tau)" in svg


def test_plot_odd3_and_no_s(capsys):
    code, out, _ = run(capsys, "plot", "--case", "odd", "--k", "3", "--no-s")
    assert code == 0 and out.startswith("<svg") and "s(tau)" not in out


def test_plot_no_solution(capsys):
    code, out, err = run(capsys, "plot", "--case", "even", "--k", "6")
    assert code == 2 and out == "" and "witness bracket" in err


def test_export_round_trip(capsys):
    code, out, _ = run(capsys, "export", "--case", "odd", "--k", "3")
    d = json.loads(out)
    assert code == 0
    assert from_json(d["solvability"]["alpha0_over_alpha1"]) == PiGraded(Fraction(1216, 21), 2)
    assert d["constants"]["flags"] == []
    assert enclose(from_json(d["constants"]["C_k"]["exact"])) == from_json(d["constants"]["C_k"]["enclosure"])


@pytest.mark.skipif(shutil.which("calabi-ansatz") is None, reason="console script not installed")
def test_console_script():
    env = dict(os.environ)
    out = subprocess.run(["calabi-ansatz", "solve", "--case", "general", "--k", "6"], capture_output=True, text=True, env=env)
    assert out.returncode == 2
    out = subprocess.run([sys.executable, "-m", "calabi_ansatz.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "0.1.0"
