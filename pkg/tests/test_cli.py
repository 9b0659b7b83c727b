import csv
import json
import math
import random
import subprocess
import sys

import numpy as np
import pytest

from dckrr import cli
from dckrr.csvio import (
    FRONTIER_HEADER,
    RECORD_HEADER,
    THEORY_HEADER,
    ConstantColumnWarning,
    emit_records,
    ingest_csv,
    read_records,
)
from dckrr.exceptions import InputError
from dckrr.sim import ErrorRecord


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# ---------------------------------------------------------------------------
# config parsing


def test_valid_config(tmp_path):
    cfg = cli.parse_config(
        write_json(tmp_path / "c.json", {"command": "simulate-rate", "seed": 1, "N_list": [256], "m_list": [1], "trials": 2}),
        env={},
    )
    assert cfg.command == "simulate-rate"
    assert (cfg.seed, cfg.N_list, cfg.m_list, cfg.trials) == (1, [256], [1], 2)
    assert cfg.lambda_rule == "global" and cfg.workers is None


def test_missing_command_names_key(tmp_path):
    with pytest.raises(InputError, match="'command'"):
        cli.parse_config(write_json(tmp_path / "c.json", {"N": 10}), env={})


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(InputError, match="trails"):
        cli.parse_config(write_json(tmp_path / "c.json", {"command": "theory", "N": 10, "trails": 3}), env={})


@pytest.mark.parametrize(
    "values, fragment",
    [
        ({"command": "simulate-rate", "N_list": [256]}, "m_list"),
        ({"command": "simulate-rate", "N_list": [256], "m_list": [1], "trials": "2"}, "trials"),
        ({"command": "simulate-rate", "N_list": [0], "m_list": [1]}, "N_list"),
        ({"command": "theory", "N": 10, "lambda_rule": "cv"}, "lambda"),
        ({"command": "train"}, "train"),
        ({"command": "theory"}, "'N'"),
    ],
)
def test_config_errors(tmp_path, values, fragment):
    with pytest.raises(InputError, match=fragment):
        cli.parse_config(write_json(tmp_path / "c.json", values), env={})


def test_flags_override_file_and_env_default(tmp_path):
    path = write_json(tmp_path / "c.json", {"command": "simulate-rate", "N_list": [256], "m_list": [1], "seed": 1})
    cfg = cli.parse_config(path, {"seed": "7", "m_list": "1,4", "lambda_rule": "explicit:0.01"}, env={"DCKRR_WORKERS": "3"})
    assert (cfg.seed, cfg.m_list, cfg.lambda_rule, cfg.workers) == (7, [1, 4], "explicit:0.01", 3)
    cfg = cli.parse_config(path, {"workers": "2"}, env={"DCKRR_WORKERS": "3"})
    assert cfg.workers == 2


# ---------------------------------------------------------------------------
# csv ingestion


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


def test_ingest_unit_std_features_unchanged(tmp_path):
    # population std of (-1, 0, 1) * sqrt(3/2) is 1
    s = math.sqrt(1.5)
    path = write_csv(tmp_path / "d.csv", ["a", "y"], [[-s, 1], [0.0, 2], [s, 3]])
    data = ingest_csv(path, "y", standardize=True)
    np.testing.assert_allclose(data.X[:, 0], [-s, 0.0, s], rtol=1e-15)
    np.testing.assert_array_equal(data.y, [1, 2, 3])


def test_ingest_halves_column_with_std_two(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["y", "a", "b"], [[0, 1, 5], [0, 5, 5], [1, 1, 5], [1, 5, 5]])
    with pytest.warns(ConstantColumnWarning, match="'b'"):
        data = ingest_csv(path, "y", standardize=True)
    np.testing.assert_array_equal(data.X[:, 0], [0.5, 2.5, 0.5, 2.5])
    np.testing.assert_array_equal(data.X[:, 1], [5, 5, 5, 5])


def test_ingest_reports_bad_cell(tmp_path):
    rows = [[i, i * 2.0] for i in range(10)]
    rows[6][1] = "abc"
    path = write_csv(tmp_path / "d.csv", ["y", "feat"], rows)
    with pytest.raises(InputError, match=r"row 7.*|feat") as err:
        ingest_csv(path, "y")
    assert "row 7" in str(err.value) and "'feat'" in str(err.value)


def test_ingest_errors(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(InputError, match="empty"):
        ingest_csv(str(empty), "y")
    path = write_csv(tmp_path / "d.csv", ["a", "b"], [[1, 2]])
    with pytest.raises(InputError, match="target"):
        ingest_csv(path, "y")


# ---------------------------------------------------------------------------
# csv emission


def test_empty_records_give_header_only(tmp_path):
    emit_records([], tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == "N,m,lambda,trial,mse,fit_seconds,status\n"


def test_single_record_round_trip(tmp_path):
    rec = ErrorRecord(256, 4, 256 ** (-2 / 3), 3, 0.1 / 3, 0.0123456789, "ok")
    emit_records([rec], tmp_path / "r.csv")
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 2
    assert read_records(tmp_path / "r.csv") == [rec]


def test_shuffled_records_sorted_identically(tmp_path):
    rng = np.random.default_rng(0)
    recs = [
        ErrorRecord(int(N), int(m), 0.01, t, float(rng.uniform()), float(rng.uniform()))
        for N in (512, 256) for m in (4, 1) for t in range(25)
    ]
    outs = []
    for seed in range(3):
        shuffled = recs[:]
        random.Random(seed).shuffle(shuffled)
        emit_records(shuffled, tmp_path / f"r{seed}.csv")
        outs.append((tmp_path / f"r{seed}.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]
    back = read_records(tmp_path / "r0.csv")
    assert [(r.N, r.m, r.trial) for r in back] == sorted((r.N, r.m, r.trial) for r in recs)


def test_nan_round_trip(tmp_path):
    rec = ErrorRecord(8192, 1, 0.001, 0, float("nan"), float("nan"), "fail")
    emit_records([rec], tmp_path / "r.csv")
    back = read_records(tmp_path / "r.csv")[0]
    assert back.status == "fail" and math.isnan(back.mse)


# ---------------------------------------------------------------------------
# end to end


def test_theory_command(tmp_path):
    out = tmp_path / "t.csv"
    cfg = {"command": "theory", "decay": {"variant": "polynomial", "nu": 1.0, "c": 1.0}, "N": 4096, "out": str(out)}
    assert cli.main(["--config", write_json(tmp_path / "c.json", cfg)]) == 0
    rows = read_rows(out)
    assert tuple(rows[0]) == THEORY_HEADER
    row = dict(zip(rows[0], rows[1]))
    assert row["lambda"] == "0.00390625"
    assert row["constant_caveat"] == "true"
    assert float(row["total"]) >= float(row["leading"])


def test_simulate_rate_byte_identical(tmp_path):
    args = ["simulate-rate", "--n-list", "256,512", "--m-list", "1,4", "--trials", "2", "--seed", "3", "--timing", "false"]
    assert cli.main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    rows = read_rows(tmp_path / "a.csv")
    assert tuple(rows[0]) == RECORD_HEADER and len(rows) == 9


def test_partition_and_timing_commands(tmp_path):
    assert cli.main(["simulate-partitions", "--n", "300", "--m-list", "1,2", "--trials", "1", "--out", str(tmp_path / "p.csv")]) == 0
    assert len(read_rows(tmp_path / "p.csv")) == 3
    assert cli.main(
        ["timing-table", "--n-list", "400", "--m-list", "1,4", "--trials", "1", "--memory-cap", "500000", "--out", str(tmp_path / "t.csv")]
    ) == 0
    status = {r[1]: r[6] for r in read_rows(tmp_path / "t.csv")[1:]}
    assert status == {"1": "fail", "4": "ok"}


def test_frontier_command(tmp_path):
    cfg = {
        "command": "frontier",
        "N": 300,
        "dim": 2,
        "method_grid": {"dc": [1, 4], "nystrom": [50], "rff": [64]},
        "out": str(tmp_path / "f.csv"),
    }
    assert cli.main(["--config", write_json(tmp_path / "c.json", cfg)]) == 0
    rows = read_rows(tmp_path / "f.csv")
    assert tuple(rows[0]) == FRONTIER_HEADER
    assert [r[0] for r in rows[1:]] == ["dc", "dc", "nystrom", "rff"]


def test_fit_and_predict_commands(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(size=60)
    train = write_csv(tmp_path / "train.csv", ["x", "y"], [[a, math.sin(3 * a)] for a in x])
    test = write_csv(tmp_path / "test.csv", ["x", "y"], [[a, 0.0] for a in (0.1, 0.5, 0.9)])
    assert cli.main(["fit", "--data", train, "--target", "y", "--m", "2", "--out", str(tmp_path / "fit.csv")]) == 0
    fit = read_rows(tmp_path / "fit.csv")
    assert fit[0] == ["N", "m", "lambda", "train_mse", "fit_seconds"] and fit[1][:2] == ["60", "2"]
    assert cli.main(
        ["predict", "--data", train, "--target", "y", "--test-data", test, "--lambda", "0.001", "--out", str(tmp_path / "p.csv")]
    ) == 0
    pred = read_rows(tmp_path / "p.csv")
    assert pred[0] == ["index", "prediction"]
    np.testing.assert_allclose([float(r[1]) for r in pred[1:]], np.sin([0.3, 1.5, 2.7]), atol=0.05)


def test_fit_rejects_out_of_range_sobolev_inputs(tmp_path, capsys):
    train = write_csv(tmp_path / "train.csv", ["x", "y"], [[2.0, 1.0], [0.5, 0.0]])
    assert cli.main(["fit", "--data", train, "--target", "y"]) == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["type"] == "InputError" and "[0, 1]" in err["error"]


@pytest.mark.parametrize(
    "argv",
    [["bogus"], [], ["theory"], ["simulate-rate", "--n-list", "abc", "--m-list", "1"], ["--config", "/nonexistent.json"]],
)
def test_failures_exit_nonzero_with_json_line(argv):
    proc = subprocess.run([sys.executable, "-m", "dckrr", *argv], capture_output=True, text=True)
    assert proc.returncode == 1
    lines = proc.stderr.strip().splitlines()
    assert len(lines) == 1
    err = json.loads(lines[0])
    assert set(err) == {"error", "type"}


def test_success_exit_status():
    proc = subprocess.run(
        [sys.executable, "-m", "dckrr", "theory", "--n", "4096", "--decay", '{"variant": "polynomial", "nu": 1.0}'],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stderr == ""
    assert proc.stdout.splitlines()[1].split(",")[2] == "0.00390625"
