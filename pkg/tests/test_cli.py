"""Command-line interface: flags, exit codes, output formats."""

import csv
import re

import numpy as np
import pytest

import envylab.mechanisms
from envylab import Matching, read_csv
from envylab.cli import main


@pytest.mark.parametrize("args", [["--help"], ["simulate", "--help"], ["predict", "--help"],
                                  ["verify", "--help"], ["coupon", "--help"]])
def test_help_exits_zero(args, capsys):
    assert main(args) == 0
    assert "--" in capsys.readouterr().out


def test_unknown_flag_exits_two(capsys):
    assert main(["simulate", "--bogus"]) == 2
    capsys.readouterr()


def test_missing_subcommand_exits_two(capsys):
    assert main([]) == 2
    capsys.readouterr()


def test_simulate_writes_csv_and_summary(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["simulate", "--sizes", "100", "--reps", "80", "--mechanisms", "da",
                 "--seed", "42", "--out", str(out), "--threads", "1"])
    assert code == 0
    records = read_csv(str(out))
    assert [(r.metric) for r in records] == ["unenvied", "envy_nobody"]
    printed = capsys.readouterr().out
    assert "5.18738" in printed  # H_100 prediction shown in the summary
    assert str(out) in printed


def test_simulate_rejects_zero_sizes(tmp_path, capsys):
    assert main(["simulate", "--sizes", "0", "--reps", "10"]) == 2
    assert "sizes must be >= 1" in capsys.readouterr().err


def test_simulate_rejects_bad_mechanism(capsys):
    assert main(["simulate", "--sizes", "5", "--reps", "2", "--mechanisms", "boston"]) == 2
    assert "mechanism" in capsys.readouterr().err


def test_simulate_env_threads_equivalence(tmp_path, capsys, monkeypatch):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    base = ["simulate", "--sizes", "10,20", "--reps", "40", "--mechanisms", "da,rsd",
            "--seed", "7"]
    monkeypatch.setenv("ENVYLAB_THREADS", "3")
    assert main(base + ["--out", str(out_a)]) == 0
    monkeypatch.delenv("ENVYLAB_THREADS")
    assert main(base + ["--out", str(out_b), "--threads", "1"]) == 0
    capsys.readouterr()
    assert out_a.read_bytes() == out_b.read_bytes()


def test_simulate_per_replication_file(tmp_path, capsys):
    out = tmp_path / "agg.csv"
    per = tmp_path / "per.csv"
    assert main(["simulate", "--sizes", "8", "--reps", "12", "--mechanisms", "ttc",
                 "--out", str(out), "--per-replication", str(per), "--threads", "1"]) == 0
    capsys.readouterr()
    with open(per) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "mechanism", "replication", "seed",
                       "unenvied", "envy_nobody", "total_proposals", "mean_rank"]
    assert len(rows) == 13


def test_predict_table_values(capsys):
    assert main(["predict", "--n", "10000"]) == 0
    out = capsys.readouterr().out
    assert "9.787606" in out      # unenvied under both mechanisms
    assert "1021.70" in out       # asymptotic top-choice count under da
    assert "5000.5" in out        # exact top-choice count under rsd

    assert main(["predict", "--n", "1"]) == 0
    out = capsys.readouterr().out
    for line in out.splitlines():
        if line.startswith(("da", "rsd")):
            assert line.count("1.000000") == 2

    assert main(["predict", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert "1.833333" in out
    assert "2.000000" in out


def test_predict_rejects_bad_n(capsys):
    assert main(["predict", "--n", "0"]) == 2
    capsys.readouterr()


def test_verify_small_sizes_pass(capsys):
    assert main(["verify", "--max-n", "2"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "[FAIL]" not in out


def test_verify_guard_rejects_large_n(capsys):
    assert main(["verify", "--max-n", "10"]) == 2
    err = capsys.readouterr().err
    assert "guard" in err


def test_verify_detects_tampered_mechanism(capsys, monkeypatch):
    real = envylab.mechanisms.deferred_acceptance

    def tampered(market):
        matching = real(market)
        if market.n >= 2:  # swap two students' schools
            flipped = matching.assignment.copy()
            flipped[[0, 1]] = flipped[[1, 0]]
            return Matching(assignment=flipped)
        return matching

    monkeypatch.setattr(envylab.mechanisms, "deferred_acceptance", tampered)
    assert main(["verify", "--max-n", "2"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL]" in out


def test_coupon_single_type(capsys):
    assert main(["coupon", "--n", "1", "--reps", "10"]) == 0
    out = capsys.readouterr().out
    assert re.search(r"singleton types : 1\b", out)


def test_coupon_two_types_analytic_mean(tmp_path, capsys):
    out_path = tmp_path / "runs.csv"
    assert main(["coupon", "--n", "2", "--reps", "20000", "--seed", "3",
                 "--out", str(out_path)]) == 0
    capsys.readouterr()
    with open(out_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["replication", "stopping_time", "singleton_count"]
    singles = np.array([int(r[2]) for r in rows[1:]])
    se = singles.std(ddof=1) / np.sqrt(len(singles))
    assert abs(singles.mean() - 1.5) < 3 * se


def test_coupon_rejects_bad_flags(capsys):
    assert main(["coupon", "--n", "0", "--reps", "5"]) == 2
    assert main(["coupon", "--n", "5", "--reps", "0"]) == 2
    capsys.readouterr()
