import json

import pytest

from rmt_lab.cli import build_parser, main, resolve_config
from rmt_lab.config import ExperimentConfig, save_config
from rmt_lab.io import read_csv, read_header, read_metadata


def _run(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


def test_no_command_prints_help(capsys):
    assert main([]) == 0
    assert "params" in capsys.readouterr().out


def test_params_json(capsys):
    assert _run(["params", "--tau", "0.5", "--gamma", "1", "--kp", "2", "--n", "16", "--json"]) == 0
    out = capsys.readouterr().out
    assert "0.53112887" in out
    assert '"K_FT"' in out


def test_params_table_at_unit_kp(capsys):
    assert _run(["params", "--tau", "0.3", "--kp", "1", "--threads", "1"]) == 0
    assert "C_strong" in capsys.readouterr().out


def test_invalid_parameters_exit_with_config_error(tmp_path):
    assert _run(["params", "--tau", "1.5", "--out", str(tmp_path)]) == 2
    assert _run(["sample", "--n", "1", "--out", str(tmp_path)]) == 2


def test_config_file_with_flag_override(tmp_path):
    path = save_config(ExperimentConfig(tau=0.1, n=12, threads=1), tmp_path / "config.json")
    args = build_parser().parse_args(["sample", "--config", str(path), "--n", "6", "--seed", "3"])
    config = resolve_config(args)
    assert config.tau == 0.1
    assert config.n == 6
    assert config.seed == 3


def test_sample_analyze_and_kernel(tmp_path):
    out = tmp_path / "run"
    assert _run(["--quiet", "sample", "--ensemble", "elliptic", "--tau", "0.3", "--n", "8",
                 "--draws", "3", "--seed", "5", "--threads", "1", "--out", str(out)]) == 0
    metadata = read_metadata(out)
    assert metadata["eigenvalue_count"] == 24
    assert metadata["seed"] == 5
    assert (out / "spectra.bin").exists()
    assert read_header(out / "spectra.csv")["config_hash"] == metadata["config_hash"]

    analysis = tmp_path / "analysis"
    assert _run(["--quiet", "analyze", "--samples", str(out), "--out", str(analysis), "--threads", "1"]) == 0
    summary = json.loads((analysis / "analysis.json").read_text())
    assert summary["spectra"] == 3
    assert summary["config_hash"] == metadata["config_hash"]
    assert len(read_csv(analysis / "marginal_x.csv")) == 40

    table = tmp_path / "kernel"
    assert _run(["--quiet", "kernel", "--tau", "0.5", "--regime", "strong_limit", "--out", str(table),
                 "--threads", "1"]) == 0
    frame = read_csv(table / "kernel.csv")
    assert len(frame) == 25
    origin = frame[(frame["re1"] == 0.0) & (frame["im1"] == 0.0)]
    assert origin["re_val"].iloc[0] == pytest.approx(1.0 / 3.141592653589793)


def test_sample_is_reproducible(tmp_path):
    argv = ["--quiet", "sample", "--ensemble", "ginibre", "--n", "6", "--draws", "2", "--seed", "11",
            "--threads", "1"]
    assert _run(argv + ["--out", str(tmp_path / "a")]) == 0
    assert _run(argv + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    assert (tmp_path / "a" / "spectra.csv").read_bytes() == (tmp_path / "b" / "spectra.csv").read_bytes()


def test_analyze_without_samples_fails(tmp_path):
    assert _run(["--quiet", "analyze", "--out", str(tmp_path)]) == 1


def test_verify_selection(tmp_path):
    assert _run(["--quiet", "verify", "--suite", "nonsense", "--out", str(tmp_path)]) == 1
    assert _run(["--quiet", "verify", "--suite", ",", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify-report.json").read_text())
    assert report["passed"] is True
    assert report["results"] == []
