import numpy as np
import pandas as pd
import pytest

import rmt_lab
from rmt_lab.config import ExperimentConfig, OutputSettings, config_hash
from rmt_lab.errors import ConfigError, DomainError
from rmt_lab.io import (
    histogram_frame,
    kernel_frame,
    load_spectra,
    read_csv,
    read_header,
    read_metadata,
    read_spectra_bin,
    spectra_frame,
    write_csv,
    write_metadata,
    write_spectra,
    write_spectra_bin,
)
from rmt_lab.kernels import KernelContext, kernel_profile
from rmt_lab.stats import marginal_x

SPECTRA = [np.array([0.5 + 0.25j, -1.0 + 0.0j]), np.array([1.0 / 3.0 - 2.0j])]


def test_csv_header_and_body(tmp_path):
    frame = pd.DataFrame({"x": [0.1, 1.0 / 3.0], "y": [2.0, -1e-300]})
    path = write_csv(frame, tmp_path / "table.csv", "abc123", 42)
    lines = path.read_text().splitlines()
    assert lines[:3] == ["# config_hash=abc123", "# seed=42", f"# version={rmt_lab.__version__}"]
    assert read_header(path) == {"config_hash": "abc123", "seed": "42", "version": rmt_lab.__version__}
    back = read_csv(path)
    assert back["x"].tolist() == [0.1, 1.0 / 3.0]
    assert back["y"].tolist() == [2.0, -1e-300]


def test_csv_is_byte_identical_across_writes(tmp_path):
    frame = spectra_frame(SPECTRA)
    first = write_csv(frame, tmp_path / "a.csv", "h", 1).read_bytes()
    second = write_csv(frame, tmp_path / "b.csv", "h", 1).read_bytes()
    assert first == second


def test_binary_records(tmp_path):
    path = write_spectra_bin(SPECTRA, tmp_path / "spectra.bin")
    assert path.stat().st_size == 2 * 4 + 3 * 16
    back = read_spectra_bin(path)
    assert len(back) == 2
    np.testing.assert_array_equal(back[0], SPECTRA[0])
    np.testing.assert_array_equal(back[1], SPECTRA[1])


def test_truncated_binary_record(tmp_path):
    path = write_spectra_bin(SPECTRA, tmp_path / "spectra.bin")
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(DomainError):
        read_spectra_bin(path)


def test_spectra_frame_layout():
    frame = spectra_frame(SPECTRA)
    assert list(frame.columns) == ["draw", "re", "im"]
    assert frame["draw"].tolist() == [0, 0, 1]
    assert spectra_frame([]).empty


def test_metadata(tmp_path):
    config = ExperimentConfig(threads=1, seed=9)
    path = write_metadata(tmp_path, config, {"accept_rate": np.float64(0.5), "counts": np.arange(2)})
    assert path.name == "metadata.json"
    metadata = read_metadata(tmp_path)
    assert metadata["tool"] == "rmt-lab"
    assert metadata["seed"] == 9
    assert metadata["config_hash"] == config_hash(config)
    assert metadata["counts"] == [0, 1]
    assert ExperimentConfig.from_dict(metadata["config"]) == config
    with pytest.raises(ConfigError):
        read_metadata(tmp_path / "nowhere")


@pytest.mark.parametrize("formats", [("bin",), ("csv",), ("parquet",)])
def test_load_spectra_from_any_format(tmp_path, formats):
    config = ExperimentConfig(threads=1, output=OutputSettings(directory=str(tmp_path), formats=formats))
    written = write_spectra(SPECTRA, tmp_path, config)
    assert len(written) == 1
    back = load_spectra(tmp_path)
    assert len(back) == 2
    np.testing.assert_allclose(back[0], SPECTRA[0], rtol=0, atol=0)


def test_load_spectra_missing(tmp_path):
    with pytest.raises(ConfigError):
        load_spectra(tmp_path)


def test_tables():
    ctx = KernelContext(a=3.0, b=1.0, n=4, regime_tag="strong_limit")
    profile = kernel_profile(np.array([[0.0, 0.0], [0.5j, 0.1]]), ctx)
    frame = kernel_frame(profile)
    assert list(frame.columns) == ["re1", "im1", "re2", "im2", "re_val", "im_val", "log_scale"]
    assert frame["re_val"][0] == pytest.approx(1.0 / np.pi)
    marginal = histogram_frame(marginal_x(SPECTRA, [-2.0, 0.0, 2.0]))
    assert marginal["count"].tolist() == [1, 2]
