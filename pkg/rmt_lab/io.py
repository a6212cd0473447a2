"""
Copyright 2025 Samapriya Roy

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

Spectrum records, CSV/Parquet tables and run metadata
"""

import json
import logging
import struct
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

import rmt_lab
from rmt_lab.config import config_hash
from rmt_lab.ensembles import SpectrumSample
from rmt_lab.errors import ConfigError, DomainError
from rmt_lab.stats import Histogram2D

logger = logging.getLogger("rmt-lab.io")

TOOL_NAME = "rmt-lab"
METADATA_FILE = "metadata.json"
SPECTRA_BIN = "spectra.bin"
SPECTRA_CSV = "spectra.csv"
SPECTRA_PARQUET = "spectra.parquet"

_COUNT = struct.Struct("<I")
_FLOAT_FORMAT = "%.17g"


def header_lines(digest, seed):
    """The three comment lines opening every CSV"""
    return [
        f"# config_hash={digest}",
        f"# seed={seed}",
        f"# version={rmt_lab.__version__}",
    ]


def write_csv(frame, path, digest, seed):
    """
    Write a DataFrame as CSV behind the provenance header

    Floats are written with 17 significant digits and no timestamp, so the body
    is byte-identical across reruns of the same config.

    Returns:
        Path: The written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write("\n".join(header_lines(digest, seed)) + "\n")
        frame.to_csv(f, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(path):
    """Read a CSV written by write_csv, skipping the header comments"""
    return pd.read_csv(path, comment="#", float_precision="round_trip")


def read_header(path):
    """Provenance header of a CSV as a dict"""
    header = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
    return header


def write_spectra_bin(samples, path):
    """
    Write spectra as little-endian records

    Each record is a uint32 count followed by count (float64 re, float64 im) pairs.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        for sample in samples:
            values = np.asarray(sample.eigenvalues if isinstance(sample, SpectrumSample) else sample,
                                dtype=np.complex128)
            f.write(_COUNT.pack(values.size))
            f.write(np.column_stack([values.real, values.imag]).astype("<f8").tobytes())
    logger.info(f"Wrote {len(samples)} spectrum records to {path}")
    return path


def read_spectra_bin(path):
    """
    Read records written by write_spectra_bin

    Returns:
        list: One complex ndarray per draw
    """
    data = Path(path).read_bytes()
    spectra = []
    offset = 0
    while offset < len(data):
        if offset + _COUNT.size > len(data):
            raise DomainError(f"Truncated record header in {path} at byte {offset}")
        (count,) = _COUNT.unpack_from(data, offset)
        offset += _COUNT.size
        end = offset + 16 * count
        if end > len(data):
            raise DomainError(f"Truncated record body in {path} at byte {offset}")
        pairs = np.frombuffer(data[offset:end], dtype="<f8").reshape(count, 2)
        spectra.append(pairs[:, 0] + 1j * pairs[:, 1])
        offset = end
    return spectra


def spectra_frame(samples):
    """Long table with columns draw, re, im"""
    rows = []
    for index, sample in enumerate(samples):
        values = np.asarray(sample.eigenvalues if isinstance(sample, SpectrumSample) else sample)
        rows.append(pd.DataFrame({"draw": index, "re": values.real, "im": values.imag}))
    if not rows:
        return pd.DataFrame(columns=["draw", "re", "im"])
    return pd.concat(rows, ignore_index=True)


def frame_spectra(frame):
    """Inverse of spectra_frame"""
    return [(group["re"] + 1j * group["im"]).to_numpy() for _, group in frame.groupby("draw", sort=True)]


def kernel_frame(profile):
    """KernelProfile as a table"""
    z1 = np.array([p[0] for p in profile.grid], dtype=complex)
    z2 = np.array([p[1] for p in profile.grid], dtype=complex)
    values = np.asarray(profile.values, dtype=complex)
    log_scale = np.broadcast_to(np.asarray(profile.log_scale, dtype=float), values.shape)
    return pd.DataFrame({
        "re1": z1.real, "im1": z1.imag,
        "re2": z2.real, "im2": z2.imag,
        "re_val": values.real, "im_val": values.imag,
        "log_scale": log_scale,
    })


def histogram_frame(hist):
    """Histogram2D or Marginal1D as a table"""
    if isinstance(hist, Histogram2D):
        x_lo, y_lo = np.meshgrid(hist.x_edges[:-1], hist.y_edges[:-1], indexing="ij")
        x_hi, y_hi = np.meshgrid(hist.x_edges[1:], hist.y_edges[1:], indexing="ij")
        return pd.DataFrame({
            "x_lo": x_lo.ravel(), "x_hi": x_hi.ravel(),
            "y_lo": y_lo.ravel(), "y_hi": y_hi.ravel(),
            "count": hist.counts.ravel(),
            "density": hist.density.ravel(),
            "se": hist.se.ravel(),
        })
    return pd.DataFrame({
        "bin_lo": hist.edges[:-1],
        "bin_hi": hist.edges[1:],
        "count": hist.counts,
        "density": hist.density,
        "se": hist.se,
    })


def correlation_frame(estimate):
    """LocalCorrelationEstimate as a table"""
    target = estimate.target if estimate.target is not None else np.full(estimate.g2.shape, np.nan)
    return pd.DataFrame({
        "r_lo": estimate.r_edges[:-1],
        "r_hi": estimate.r_edges[1:],
        "g2": estimate.g2,
        "se": estimate.se,
        "target": target,
    })


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def write_metadata(directory, config, diagnostics=None):
    """
    Write metadata.json for a run

    Args:
        directory (str or Path): Output directory
        config (ExperimentConfig): Run config
        diagnostics (dict, optional): Extra run-specific entries

    Returns:
        Path: The metadata file
    """
    path = Path(directory) / METADATA_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {
        "tool": TOOL_NAME,
        "version": rmt_lab.__version__,
        "config_hash": config_hash(config),
        "seed": config.seed,
        "config": config.to_dict(),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    metadata.update(_jsonable(diagnostics or {}))
    with open(path, "w", encoding="utf-8") as f:
        json.dump(metadata, f, indent=2, ensure_ascii=False)
    logger.info(f"Metadata saved to {path}")
    return path


def read_metadata(directory):
    path = Path(directory) / METADATA_FILE
    if not path.exists():
        raise ConfigError(f"No {METADATA_FILE} in {directory}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_spectra(samples, directory, config):
    """
    Write spectra in every configured format

    Returns:
        list: Paths written
    """
    directory = Path(directory)
    digest = config_hash(config)
    written = []
    for export_format in config.output.formats:
        if export_format == "bin":
            written.append(write_spectra_bin(samples, directory / SPECTRA_BIN))
        elif export_format == "csv":
            written.append(write_csv(spectra_frame(samples), directory / SPECTRA_CSV, digest, config.seed))
        elif export_format == "parquet":
            path = directory / SPECTRA_PARQUET
            directory.mkdir(parents=True, exist_ok=True)
            spectra_frame(samples).to_parquet(path, index=False)
            logger.info(f"Wrote spectra to {path}")
            written.append(path)
    return written


def load_spectra(directory):
    """
    Read spectra from a sample directory, preferring the binary records

    Returns:
        list: One complex ndarray per draw
    """
    directory = Path(directory)
    if (directory / SPECTRA_BIN).exists():
        return read_spectra_bin(directory / SPECTRA_BIN)
    if (directory / SPECTRA_CSV).exists():
        return frame_spectra(read_csv(directory / SPECTRA_CSV))
    if (directory / SPECTRA_PARQUET).exists():
        return frame_spectra(pd.read_parquet(directory / SPECTRA_PARQUET))
    raise ConfigError(f"No spectra found in {directory}")
