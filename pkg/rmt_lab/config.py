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

Experiment configuration loading, validation and hashing
"""

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from rmt_lab.ensembles import ENSEMBLE_TAGS, FIXED_TRACE_TAGS, ChainSettings, SamplerConfig
from rmt_lab.errors import ConfigError, DomainError
from rmt_lab.kernels import REGIMES
from rmt_lab.params import ModelParams

logger = logging.getLogger("rmt-lab.config")

THREADS_ENV = "RMT_THREADS"
OUTPUT_FORMATS = ("csv", "parquet", "bin")
HASH_EXCLUDED = ("seed", "threads", "output")


def default_threads():
    """
    Thread count from the RMT_THREADS environment variable

    Returns:
        int: Parsed value, or 1 when unset
    """
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == "":
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{value}'")
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{value}'")
    return threads


@dataclass(frozen=True)
class GridSpec:
    """
    Rectangular grid of kernel evaluation points

    The first argument runs over the grid. The second is the grid point itself
    when anchor is None, otherwise the fixed anchor.
    """

    re_min: float = -1.0
    re_max: float = 1.0
    im_min: float = -1.0
    im_max: float = 1.0
    re_points: int = 5
    im_points: int = 5
    anchor: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.re_points < 1 or self.im_points < 1:
            raise ConfigError("grid.re_points and grid.im_points must be positive")
        if self.re_max < self.re_min or self.im_max < self.im_min:
            raise ConfigError("grid bounds must satisfy min <= max")
        if self.anchor is not None:
            if len(self.anchor) != 2:
                raise ConfigError("grid.anchor must be a [re, im] pair")
            object.__setattr__(self, "anchor", tuple(float(v) for v in self.anchor))

    def points(self):
        re = np.linspace(self.re_min, self.re_max, self.re_points)
        im = np.linspace(self.im_min, self.im_max, self.im_points)
        x, y = np.meshgrid(re, im, indexing="ij")
        return (x + 1j * y).ravel()

    def pairs(self):
        """List of (z1, z2) evaluation pairs"""
        points = self.points()
        if self.anchor is None:
            return [(z, z) for z in points]
        anchor = complex(*self.anchor)
        return [(z, anchor) for z in points]


@dataclass(frozen=True)
class BinSpec:
    """Bins used by the analysis estimators"""

    x_min: float = -2.0
    x_max: float = 2.0
    x_bins: int = 40
    y_min: float = -1.0
    y_max: float = 1.0
    y_bins: int = 20
    r_min: float = 0.2
    r_max: float = 3.0
    r_bins: int = 14
    delta_band: float = 0.1
    center: Tuple[float, float] = (0.0, 0.0)
    window: float = 5.0

    def __post_init__(self):
        for name in ("x_bins", "y_bins", "r_bins"):
            if getattr(self, name) < 1:
                raise ConfigError(f"bins.{name} must be positive")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ConfigError("bins ranges must satisfy min < max")
        if not 0.0 <= self.r_min < self.r_max <= 2.0 * self.window:
            raise ConfigError(f"bins.r_min, bins.r_max must satisfy 0 <= r_min < r_max <= {2.0 * self.window}")
        if self.delta_band <= 0.0:
            raise ConfigError("bins.delta_band must be positive")
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))

    def x_edges(self):
        return np.linspace(self.x_min, self.x_max, self.x_bins + 1)

    def y_edges(self):
        return np.linspace(self.y_min, self.y_max, self.y_bins + 1)

    def r_edges(self):
        return np.linspace(self.r_min, self.r_max, self.r_bins + 1)

    @property
    def center_point(self):
        return complex(*self.center)


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "rmt-output"
    formats: Tuple[str, ...] = ("csv", "bin")

    def __post_init__(self):
        formats = tuple(self.formats)
        unknown = [f for f in formats if f not in OUTPUT_FORMATS]
        if unknown:
            raise ConfigError(f"Unknown output format(s) {unknown}. Available: {', '.join(OUTPUT_FORMATS)}")
        object.__setattr__(self, "formats", formats)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything one run needs

    Attributes:
        ensemble (str): Ensemble tag
        tau, gamma, k_p, n, t: Model parameters
        seed (int): Run seed, excluded from the config hash
        draws (int): Spectra per sampling run
        threads (int): Worker threads, excluded from the config hash
        backend (str): Eigenvalue backend
        regime (str): Kernel regime for tabulation
        alpha (float, optional): Weak-regime α
        x_global (float): Global bulk point X
        chain (ChainSettings): Metropolis settings
        grid (GridSpec): Kernel grid
        bins (BinSpec): Analysis bins
        output (OutputSettings): Output directory and formats, excluded from the config hash
        suites (tuple): Verify suites
        extended (bool): Also run extended suites
    """

    ensemble: str = "elliptic"
    tau: float = 0.5
    gamma: float = 0.0
    k_p: float = 1.0
    n: int = 64
    t: float = 0.0
    seed: int = 0
    draws: int = 10
    threads: int = field(default_factory=default_threads)
    backend: str = "lapack"
    regime: str = "finite_n_sum"
    alpha: Optional[float] = None
    x_global: float = 0.0
    chain: ChainSettings = field(default_factory=ChainSettings)
    grid: GridSpec = field(default_factory=GridSpec)
    bins: BinSpec = field(default_factory=BinSpec)
    output: OutputSettings = field(default_factory=OutputSettings)
    suites: Tuple[str, ...] = ()
    extended: bool = False

    def __post_init__(self):
        if self.ensemble not in ENSEMBLE_TAGS:
            raise ConfigError(f"Unknown ensemble '{self.ensemble}'. Available: {', '.join(ENSEMBLE_TAGS)}")
        if self.regime not in REGIMES:
            raise ConfigError(f"Unknown kernel regime '{self.regime}'. Available: {', '.join(REGIMES)}")
        if int(self.draws) != self.draws or self.draws < 1:
            raise ConfigError(f"draws must be a positive integer, got {self.draws}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError(f"threads must be a positive integer, got {self.threads}")
        if self.alpha is not None and not self.alpha > 0.0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        object.__setattr__(self, "suites", tuple(self.suites))
        try:
            self.model_params()
            self.sampler_config()
        except DomainError as e:
            raise ConfigError(str(e)) from e

    @property
    def fixed_trace(self):
        return self.ensemble in FIXED_TRACE_TAGS

    def model_params(self):
        return ModelParams(tau=self.tau, gamma=self.gamma, k_p=self.k_p, n=self.n, t=self.t)

    def sampler_config(self):
        return SamplerConfig(params=self.model_params(), seed=self.seed, chain=self.chain)

    def to_dict(self):
        data = dataclasses.asdict(self)
        data["output"]["formats"] = list(self.output.formats)
        data["suites"] = list(self.suites)
        return data

    def with_overrides(self, **overrides):
        """Copy with every non-None override applied"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if "out" in changes:
            changes["output"] = dataclasses.replace(self.output, directory=str(changes.pop("out")))
        try:
            return dataclasses.replace(self, **changes)
        except TypeError as e:
            raise ConfigError(f"Invalid override: {str(e)}") from e

    @classmethod
    def from_dict(cls, data):
        """
        Build a config from nested dictionaries

        Raises:
            ConfigError: On unknown keys (named by their dotted path) or invalid values
        """
        return _build(cls, data, "")


_NESTED = {"chain": ChainSettings, "grid": GridSpec, "bins": BinSpec, "output": OutputSettings}


def _build(cls, data, prefix):
    if not isinstance(data, dict):
        raise ConfigError(f"Expected an object at '{prefix or '<root>'}', got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"Unknown config key '{prefix}{key}'")
    kwargs = {}
    for key, value in data.items():
        nested = _NESTED.get(key) if cls is ExperimentConfig else None
        if nested is not None:
            kwargs[key] = _build(nested, value, f"{prefix}{key}.")
        else:
            kwargs[key] = tuple(value) if isinstance(value, list) else value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"Invalid value under '{prefix or '<root>'}': {str(e)}") from e


def load_config(path):
    """
    Load an ExperimentConfig from a JSON file

    Args:
        path (str or Path): Config file

    Returns:
        ExperimentConfig
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found at {path}")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {str(e)}") from e
    logger.debug(f"Loaded config from {path}")
    return ExperimentConfig.from_dict(data)


def save_config(config, path):
    """Write an ExperimentConfig as indented JSON, creating parent directories"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(config.to_dict(), f, indent=2)
    logger.info(f"Config saved to {path}")
    return path


def config_hash(config):
    """
    SHA-256 of the canonical JSON of a config

    seed, threads and output are left out, so runs that differ only in where
    and how fast they ran share a hash.

    Returns:
        str: Hex digest
    """
    data = config.to_dict()
    for key in HASH_EXCLUDED:
        data.pop(key, None)
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
