import csv
import subprocess
import sys

import numpy as np
import pytest

from fdgain import cli
from fdgain.analysis import Theorem1Report, TraceBoundViolation


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_rho_file(tmp_path):
    out = tmp_path / "rho.csv"
    assert cli.main(["sweep-rho", "--N", "128", "--L", "16", "--rho-steps", "101", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "rho,inv_gamma,upper,lower,N,L"
    rows = read_rows(out)
    assert len(rows) == 101
    assert float(rows[0]["rho"]) == 0.0
    assert float(rows[0]["inv_gamma"]) == pytest.approx(0.125, abs=1e-9)
    assert float(rows[-1]["rho"]) == 1.0
    assert float(rows[-1]["inv_gamma"]) == pytest.approx(1.0, abs=1e-9)
    assert "\r" not in text


def test_sweep_rho_stdout_multiple_N(capsys):
    assert cli.main(["sweep-rho", "--N", "32,64", "--L", "16", "--rho-steps", "3"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert len(lines) == 1 + 6
    assert {line.split(",")[4] for line in lines[1:]} == {"32", "64"}
    # the summary line stays off stdout so the CSV can be piped
    assert "sweep-rho" in captured.err


def test_sweep_ratio(tmp_path):
    out = tmp_path / "ratio.csv"
    assert cli.main(["sweep-ratio", "--L", "8", "--rho", "0,0.5", "--ratios", "2,4", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "N,L,log2_ratio,inv_gamma,upper,lower,rho"
    rows = read_rows(out)
    assert [r["N"] for r in rows] == ["16", "32", "16", "32"]
    assert float(rows[1]["inv_gamma"]) == pytest.approx(0.25, abs=1e-12)
    assert float(rows[1]["log2_ratio"]) == 2.0


def test_sweep_ratio_N_list(tmp_path):
    out = tmp_path / "ratio.csv"
    assert cli.main(["sweep-ratio", "--L", "4", "--N-list", "8,12", "--out", str(out)]) == 0
    assert [r["N"] for r in read_rows(out)] == ["8", "12"]


def test_experiment_summary_and_dump(tmp_path, capsys):
    out, dump = tmp_path / "exp.csv", tmp_path / "trials.csv"
    argv = ["experiment", "--N", "16", "--L", "4", "--model", "identity", "--trials", "600",
            "--out", str(out), "--dump-trials", str(dump)]
    assert cli.main(argv) == 0
    printed = capsys.readouterr().out
    assert "gamma" in printed and "analytic 4" in printed
    (row,) = read_rows(out)
    assert float(row["analytic_gamma"]) == pytest.approx(4.0)
    assert row["trials"] == "600"
    trials = read_rows(dump)
    assert len(trials) == 600
    assert list(trials[0]) == ["trial", "fdls_SD", "fdls_DD", "dft_SD", "dft_DD"]
    mean = np.mean([float(t["fdls_SD"]) + float(t["fdls_DD"]) for t in trials])
    assert mean == pytest.approx(float(row["sum_mse_fdls"]), rel=1e-9)


def test_verify_theorem1_passes(capsys):
    assert cli.main(["verify", "--theorem1", "--trials", "1000", "--N", "16", "--L", "5"]) == 0
    assert capsys.readouterr().out.startswith("PASS theorem1")


def test_verify_default_runs_everything(capsys, tmp_path):
    out = tmp_path / "v.csv"
    assert cli.main(["verify", "--trials", "200", "--N", "8", "--L", "3", "--out", str(out)]) == 0
    assert [r["check"] for r in read_rows(out)] == ["theorem1", "gradient", "pilot"]


def test_verify_failure_exit_code(monkeypatch, capsys):
    def broken(trials, N, L, rng=None, slack=1e-9):
        rep = Theorem1Report(N=N, L=L, trials=trials, slack=slack)
        rep.violations.append(TraceBoundViolation(0, (1, 0), "upper", "forced"))
        return rep

    monkeypatch.setattr(cli, "verify_theorem1", broken)
    assert cli.main(["verify", "--theorem1", "--trials", "5", "--N", "4", "--L", "2"]) == 2
    captured = capsys.readouterr()
    assert "FAIL theorem1" in captured.out
    assert "seed (1, 0)" in captured.err


@pytest.mark.parametrize("argv", [
    ["sweep-rho", "--bogus"],
    ["nonsense"],
    ["sweep-rho", "--config", "/nonexistent/settings.cfg"],
    ["sweep-rho", "--rho-steps", "3", "--out", "/nonexistent/dir/out.csv"],
    ["sweep-rho", "--N", "4", "--L", "8", "--rho-steps", "3"],
    ["sweep-rho", "--N", "abc"],
    ["experiment", "--trials", "0"],
    ["sweep-rho", "--set", "noequals"],
])
def test_invalid_input_exits_1(argv, capsys):
    assert cli.main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nN = 64\nL = 8\nrho_steps = 5\nN_P = 2\n")
    out = tmp_path / "a.csv"
    assert cli.main(["sweep-rho", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 5 and rows[0]["N"] == "64" and rows[0]["L"] == "8"

    assert cli.main(["sweep-rho", "--config", str(cfg), "--set", "L=16", "--out", str(out)]) == 0
    assert read_rows(out)[0]["L"] == "16"

    # explicit flags beat --set
    assert cli.main(["sweep-rho", "--config", str(cfg), "--set", "L=16", "--L", "4", "--out", str(out)]) == 0
    assert read_rows(out)[0]["L"] == "4"


def test_bad_config_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("N 64\n")
    assert cli.main(["sweep-rho", "--config", str(cfg)]) == 1
    assert "bad.cfg:1" in capsys.readouterr().err


def test_seed_environment_variable(tmp_path, monkeypatch):
    argv = ["experiment", "--N", "16", "--L", "4", "--trials", "300"]
    paths = []
    for env in ("7", "7", "8"):
        monkeypatch.setenv(cli.SEED_ENV, env)
        paths.append(tmp_path / f"s{len(paths)}.csv")
        assert cli.main(argv + ["--out", str(paths[-1])]) == 0
    assert read_rows(paths[0])[0]["seed"] == "7"
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes() != paths[2].read_bytes()
    # flag wins over the environment
    assert cli.main(argv + ["--seed", "3", "--out", str(paths[2])]) == 0
    assert read_rows(paths[2])[0]["seed"] == "3"


@pytest.mark.parametrize("argv", [
    ["sweep-rho", "--N", "64", "--L", "16", "--rho-steps", "11"],
    ["sweep-ratio", "--L", "8", "--rho", "0.3,0.9"],
    ["experiment", "--N", "32", "--L", "4", "--rho", "0.5", "--trials", "1500", "--seed", "4"],
    ["sweep-rho", "--N", "16", "--L", "4", "--rho-steps", "3", "--empirical", "--trials", "700"],
])
def test_byte_identical_output(argv, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b), "--jobs", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "fdgain", "sweep-rho", "--N", "32", "--L", "8", "--rho-steps", "2",
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(out.read_text().splitlines()) == 3


def test_format_value():
    assert cli.format_value(0.1 + 0.2) == "0.3"
    assert cli.format_value(1 / 3) == "0.333333333333"
    assert cli.format_value(np.int64(5)) == "5"
    assert cli.format_value(True) == "1"
