import json
import subprocess
import sys

import pytest

from levelgas.cli import EXIT_CODES, main
from levelgas.config import RunConfig, save_config
from levelgas.io import read_metadata

from conftest import CONFIGS

NOISELESS = str(CONFIGS / "ising_noiseless.json")
WIENER = str(CONFIGS / "ising_wiener.json")
SHORT = ["--set", "schedule.t1=15.0"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_writes_csv_and_sidecar(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    code, out, _ = run(capsys, "run", WIENER, *SHORT, "--csv", str(csv))
    assert code == 0
    summary = json.loads(out)
    assert summary["samples"] == 50 and summary["csv"] == str(csv)
    meta = read_metadata(csv)
    assert meta["noise_kind"] == "wiener" and meta["config_hash"] == summary["config_hash"]
    assert RunConfig.from_dict(meta["config"]).hash() == summary["config_hash"]


def test_rerun_from_metadata_is_bit_identical(tmp_path, capsys):
    first = tmp_path / "a.csv"
    run(capsys, "run", WIENER, *SHORT, "--csv", str(first))
    cfg = RunConfig.from_dict(read_metadata(first)["config"])
    save_config(cfg, tmp_path / "again.json")
    second = tmp_path / "b.csv"
    run(capsys, "run", str(tmp_path / "again.json"), "--csv", str(second))
    assert first.read_bytes() == second.read_bytes()


def test_run_with_figures(tmp_path, capsys):
    code, out, _ = run(capsys, "run", NOISELESS, *SHORT, "--csv", str(tmp_path / "r.csv"),
                       "--svg-dir", str(tmp_path / "svg"))
    assert code == 0
    assert [p.rsplit("/", 1)[-1] for p in json.loads(out)["svg"]] == ["fig1_levels.svg", "fig2_occupations.svg"]


def test_default_output_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LEVELGAS_OUTPUT_DIR", str(tmp_path / "out"))
    code, out, _ = run(capsys, "run", NOISELESS, *SHORT)
    assert code == 0 and (tmp_path / "out" / "trajectory.csv").exists()


def test_oracle_compare_pass_and_fail(tmp_path, capsys):
    report = tmp_path / "rep.json"
    code, out, _ = run(capsys, "oracle-compare", NOISELESS, *SHORT, "--report", str(report))
    assert code == 0 and json.loads(out)["passed"] is True
    assert json.loads(report.read_text())["max_abs_entry_diff"] <= 1e-4
    code, out, _ = run(capsys, "oracle-compare", NOISELESS, *SHORT, "--entry-tol", "1e-12")
    rep = json.loads(out)
    assert code == EXIT_CODES["tolerance"] and rep["passed"] is False
    assert "worst_t" in rep and len(rep["worst_entry"]) == 2


def test_ensemble_command(tmp_path, capsys):
    csv = tmp_path / "e.csv"
    code, out, _ = run(capsys, "ensemble", WIENER, *SHORT, "-R", "3", "--seed", "7", "--workers", "1",
                       "--csv", str(csv))
    summary = json.loads(out)
    assert code == 0 and summary["R"] == 3 and summary["master_seed"] == 7
    assert csv.read_text().startswith("t,lambda,mean_occ_0")
    assert len(read_metadata(csv)["J"]) == 3


def test_emit_figures_command(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    run(capsys, "run", WIENER, *SHORT, "--csv", str(csv))
    code, out, _ = run(capsys, "emit-figures", str(csv), "--out-dir", str(tmp_path / "svg"))
    names = [p.rsplit("/", 1)[-1] for p in json.loads(out)["svg"]]
    assert code == 0 and names == ["fig3_levels_noisy.svg", "fig4_occupations_noisy.svg"]


@pytest.mark.parametrize("argv,category", [
    (["run", "/nonexistent/config.json"], "config"),
    (["run", NOISELESS, "--set", "integrator.dt=-1"], "config"),
    (["run", NOISELESS, "--set", "schedule.t0=10.0"], "degeneracy"),
    (["ensemble", NOISELESS, "-R", "0"], "config"),
])
def test_error_categories(capsys, argv, category):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_CODES[category]
    assert json.loads(err)["error"] == category


def test_schema_error_category(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("")
    code, _, err = run(capsys, "emit-figures", str(bad), "--out-dir", str(tmp_path))
    assert code == EXIT_CODES["schema"] and json.loads(err)["error"] == "schema"


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "levelgas", "run", NOISELESS, *SHORT, "--csv",
                           str(tmp_path / "x.csv")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "levelgas", "run", NOISELESS, "--set", "bogus=1"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and json.loads(proc.stderr)["error"] == "config"
