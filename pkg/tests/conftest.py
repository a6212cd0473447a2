"""Shared fixtures for the rmt-lab test suite"""

import numpy as np
import pytest

from rmt_lab.config import BinSpec, ExperimentConfig, OutputSettings
from rmt_lab.ensembles import ChainSettings
from rmt_lab.params import ModelParams


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


@pytest.fixture
def params():
    return ModelParams(tau=0.5, gamma=1.0, k_p=2.0, n=8)


@pytest.fixture
def small_config(tmp_path):
    """Cheap elliptic run writing into a temporary directory"""
    return ExperimentConfig(
        ensemble="elliptic",
        tau=0.3,
        n=8,
        draws=4,
        seed=7,
        threads=1,
        chain=ChainSettings(burn_in=50),
        bins=BinSpec(x_bins=8, y_bins=4, r_bins=4),
        output=OutputSettings(directory=str(tmp_path / "out"), formats=("csv", "bin")),
    )
