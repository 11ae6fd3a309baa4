import os
import subprocess
import sys

import numpy as np
import pytest

from sipsticky import cli
from sipsticky.config import ExperimentConfig, parse_config_file, resolve
from sipsticky.csvio import ResultTable, read_table
from sipsticky.errors import ConfigError


def _body(path):
    with open(path, "r", encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))


def test_kernel_info_chi(tmp_path):
    out = tmp_path / "k.csv"
    cli.run(["kernel-info", "--kernel", "nn", "--out", str(out)])
    table = read_table(str(out))
    rows = dict((r[0], r[1]) for r in table.rows)
    assert rows["chi"] == 0.5
    assert rows["range"] == 1
    assert rows["gcd_check"] == "ok"


def test_csv_body_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["diff-sim", "--replicas", "500", "--t", "0.5", "--seed", "77"]
    cli.run(args + ["--out", str(a)])
    cli.run(args + ["--out", str(b)])
    assert _body(a) == _body(b)
    # different seed changes the body
    c = tmp_path / "c.csv"
    cli.run(["diff-sim", "--replicas", "500", "--t", "0.5", "--seed", "78",
             "--out", str(c)])
    assert _body(a) != _body(c)


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kernel = 0.25,0.25\nt_list = 0.5\nw0_list = 0,1\n")
    out = tmp_path / "p.csv"
    cli.run(["diff-prob", "--config", str(cfg), "--out", str(out)])
    table = read_table(str(out))
    assert [r[0] for r in table.rows] == [0, 1]
    # flag overrides the file
    out2 = tmp_path / "p2.csv"
    cli.run(["diff-prob", "--config", str(cfg), "--w0-list", "2",
             "--out", str(out2)])
    assert [r[0] for r in read_table(str(out2)).rows] == [2]


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no_such_option = 1\n")
    with pytest.raises(ConfigError):
        cli.run(["kernel-info", "--config", str(cfg)])


def test_missing_config_file_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "sipsticky.cli"],
        input="", capture_output=True, text=True)
    # no subcommand: argparse error (exit 2)
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-c",
         "from sipsticky.cli import main; main()",
         ],
        env={**os.environ, "COLUMNS": "80"},
        capture_output=True, text=True)
    assert proc.returncode == 2


def test_missing_kernel_config_error(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-c",
         "import sys; sys.argv=['sipsticky','kernel-info','--config',"
         "'/nonexistent/kernel.cfg']; from sipsticky.cli import main; main()"],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "config error" in proc.stderr


def test_round_trip_table(tmp_path):
    t = ResultTable(columns=["a", "b"], metadata={"x": "1"})
    t.add(1, float("inf"))
    t.add(2, 0.125)
    path = tmp_path / "t.csv"
    t.write(str(path))
    back = read_table(str(path))
    assert back.columns == ["a", "b"]
    assert back.rows[0] == (1, float("inf"))
    assert back.rows[1] == (2, 0.125)
    assert back.metadata["x"] == "1"


def test_metadata_fields(tmp_path):
    out = tmp_path / "m.csv"
    cli.run(["kernel-info", "--out", str(out)])
    meta = read_table(str(out)).metadata
    for key in ("config_hash", "code_version", "backend", "wall_seconds",
                "schema_version"):
        assert key in meta


def test_variance_cli_has_limit_row(tmp_path):
    out = tmp_path / "v.csv"
    cli.run(["variance", "--t-list", "0.1", "--n-list", "10",
             "--out", str(out)])
    rows = read_table(str(out)).rows
    assert rows[0][0] == 10
    assert rows[1][0] == "limit"
    assert rows[0][2] > rows[1][2] > 0


def test_sticky_kernel_cli_columns(tmp_path):
    out = tmp_path / "s.csv"
    cli.run(["sticky-kernel", "--t-list", "0.5", "--v-points", "11",
             "--out", str(out)])
    table = read_table(str(out))
    assert table.columns == ["t", "v", "density", "atom", "hit_zero_prob"]
    dens = np.array([r[2] for r in table.rows])
    assert np.all(dens >= 0)


def test_threads_replicas_order_deterministic(tmp_path):
    base = ["simulate-sip", "--replicas", "4", "--lattice", "24",
            "--T", "0.3", "--seed", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.run(base + ["--threads", "1", "--out", str(a)])
    cli.run(base + ["--threads", "3", "--out", str(b)])
    assert _body(a) == _body(b)


def test_suite_isolation(monkeypatch, tmp_path, capsys):
    # a forced failure in one criterion leaves the others untouched
    from sipsticky import acceptance as acc

    def broken():
        return acc.CriterionResult(1, "sticky kernel normalization", False,
                                   "forced failure for isolation test")

    monkeypatch.setitem(acc.CRITERIA, 1, broken)
    results = acc.run_suite(out_dir=str(tmp_path), only={1, 2, 13},
                            write_artifacts=False)
    out = capsys.readouterr().out
    assert "[FAIL] criterion  1" in out
    assert "[PASS] criterion  2" in out
    assert "[PASS] criterion 13" in out
    assert [r.passed for r in results] == [False, True, True]
    assert os.path.exists(tmp_path / "acceptance_report.json")
