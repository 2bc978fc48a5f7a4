import csv
import json
import subprocess
import sys

import pytest

from mdfb import cli
from mdfb.errors import NumericalError
from mdfb.experiments import EXPERIMENTS, Fig2Config, Table1Config


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_table1_csv_contains_reference_efficiencies(tmp_path):
    out = tmp_path / "t1.csv"
    assert cli.main(["reproduce", "table1", "--out", str(out)]) == 0
    rows = _read(out)
    assert list(rows[0])[:5] == ["rate_bits", "distortion", "K", "round", "label"]
    eff = [round(float(r["efficiency"]), 4) for r in rows]
    assert eff == [0.7854, 0.6407, 0.9457, 0.9121]
    meta = [json.loads(line) for line in (tmp_path / "t1.meta.jsonl").read_text().splitlines()]
    assert meta[0]["experiment"] == "table1"
    assert set(meta[0]["versions"]) == {"mdfb", "numpy", "scipy", "python"}
    assert meta[1]["schedule"] == "db-uniform"


def test_fig2_flags_and_columns(tmp_path):
    out = tmp_path / "f2.csv"
    assert cli.main(["reproduce", "fig2", "--lambda", "0.2", "--K", "5", "--trials", "20000", "--seed", "3",
                     "--set", "eps=0.2,0.5", "--out", str(out)]) == 0
    rows = _read(out)
    assert [float(r["eps"]) for r in rows] == [0.2, 0.5]
    assert float(rows[0]["distortion"]) == pytest.approx(2.2222222, rel=1e-6)
    assert all(r["drf"] and r["mc_distortion"] for r in rows)


def test_fig7_star_points(tmp_path):
    out = tmp_path / "f7.csv"
    assert cli.main(["reproduce", "fig7", "--xi", "2", "--rounds", "5", "--out", str(out)]) == 0
    stars = [r for r in _read(out) if r["label"] == "star"]
    assert [int(r["round"]) for r in stars] == [1, 2, 3, 4, 5]
    D = [float(r["distortion_db"]) for r in stars]
    assert all(b < a for a, b in zip(D, D[1:])) and D[-1] < -0.6


@pytest.mark.parametrize("experiment", ["fig3", "fig5", "fig6"])
def test_deterministic_experiments_run(tmp_path, experiment):
    out = tmp_path / f"{experiment}.csv"
    assert cli.main(["reproduce", experiment, "--out", str(out)]) == 0
    assert len(_read(out)) > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["reproduce", "fig2", "--trials", "20000", "--set", "eps=0.05,0.5"],
        ["reproduce", "fig8", "--trials", "40000", "--set", "configs=1,2", "--set", "chunk=8192"],
    ],
    ids=["fig2", "fig8"],
)
def test_same_seed_byte_identical_across_thread_counts(tmp_path, monkeypatch, argv):
    blobs = []
    for i, threads in enumerate(("1", "4", "1")):
        monkeypatch.setenv("MDFB_THREADS", threads)
        out = tmp_path / f"run{i}.csv"
        assert cli.main(argv + ["--seed", "11", "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]
    out = tmp_path / "other.csv"
    assert cli.main(argv + ["--seed", "12", "--out", str(out)]) == 0
    assert out.read_bytes() != blobs[0]


def test_config_file_run(tmp_path):
    cfg = tmp_path / "exp.ini"
    out = tmp_path / "from_file.csv"
    cfg.write_text(f"# comment\nexperiment = fig2\nseed = 5\ntrials = 20000\neps = 0.2 ; inline\nout = {out}\n")
    assert cli.main(["run", "--config", str(cfg)]) == 0
    assert len(_read(out)) == 1
    out2 = tmp_path / "cli.csv"
    assert cli.main(["reproduce", "fig2", "--seed", "5", "--trials", "20000", "--set", "eps=0.2", "--out", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_config_file_override(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("experiment = table1\nM = 2\n")
    out = tmp_path / "o.csv"
    assert cli.main(["run", "--config", str(cfg), "--set", "K=2", "--out", str(out)]) == 0
    assert len(_read(out)) == 1


@pytest.mark.parametrize(
    "text",
    [
        "experiment = fig2\nseed = 1\nbogus = 3\n",
        "experiment = nope\n",
        "seed = 1\n",
        "experiment = fig2\n",  # stochastic without seed
        "experiment = fig2\nseed = 1\ntrials = many\n",
        "experiment = fig2\nseed = 1.5\n",
        "[section]\nexperiment = fig2\n",
        "experiment = table1\nD_final = 2.0\n",  # invalid value reaches the numeric code as a ParameterError
    ],
)
def test_config_errors_exit_2(tmp_path, text, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_unknown_flag_for_experiment_exit_2(tmp_path):
    assert cli.main(["reproduce", "table1", "--xi", "2", "--out", str(tmp_path / "x.csv")]) == 2
    assert cli.main(["reproduce", "fig9"]) == 2
    assert cli.main(["reproduce", "table1", "--set", "novalue"]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "missing.ini")]) == 2


def test_numeric_failure_exit_3(tmp_path, monkeypatch, capsys):
    def boom(cfg):
        raise NumericalError("tvq", "tvq_slope_check", "synthetic failure")

    monkeypatch.setitem(EXPERIMENTS, "table1", (Table1Config, boom))
    assert cli.main(["reproduce", "table1", "--out", str(tmp_path / "x.csv")]) == 3
    assert "tvq.tvq_slope_check" in capsys.readouterr().err


def test_verify_subset(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert cli.main(["verify", "--set", "checks=vnc,eps1", "--out", str(out)]) == 0
    rows = _read(out)
    assert [r["label"] for r in rows] == ["vnc", "eps1"] and all(r["passed"] == "1" for r in rows)
    assert "PASS vnc" in capsys.readouterr().out


def test_parse_value_types():
    from dataclasses import fields

    f = {x.name: x for x in fields(Fig2Config)}
    assert cli.parse_value(f["K"], "5") == 5
    assert cli.parse_value(f["eps"], "0.1, 0.2") == (0.1, 0.2)
    assert cli.parse_value(f["trials"], "1e6") == 1_000_000
    with pytest.raises(cli.ConfigError):
        cli.parse_value(f["lam"], "inf")


def test_float_cells_round_trip():
    for x in (0.1, 1 / 3, 2.5e-300, 123456789.123):
        assert float(cli.format_cell(x)) == x
    assert cli.format_cell(None) == "" and cli.format_cell(True) == "1"


def test_console_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    proc = subprocess.run([sys.executable, "-m", "mdfb.cli", "reproduce", "table1", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
