import json

import pytest

from rmt_lab.config import (
    THREADS_ENV,
    BinSpec,
    ExperimentConfig,
    GridSpec,
    OutputSettings,
    config_hash,
    default_threads,
    load_config,
    save_config,
)
from rmt_lab.errors import ConfigError


def test_threads_from_environment(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert default_threads() == 1
    monkeypatch.setenv(THREADS_ENV, "4")
    assert default_threads() == 4
    assert ExperimentConfig().threads == 4


@pytest.mark.parametrize("value", ["0", "-2", "many"])
def test_invalid_threads_environment(monkeypatch, value):
    monkeypatch.setenv(THREADS_ENV, value)
    with pytest.raises(ConfigError):
        default_threads()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"ensemble": "wishart"},
        {"regime": "sine"},
        {"tau": 1.5},
        {"k_p": -1.0},
        {"n": 1},
        {"draws": 0},
        {"alpha": 0.0},
        {"seed": -3},
    ],
)
def test_invalid_values(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(threads=1, **kwargs)


def test_unknown_keys_are_named():
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError, match="chain.step"):
        ExperimentConfig.from_dict({"chain": {"step": 0.1}})
    with pytest.raises(ConfigError, match="grid"):
        ExperimentConfig.from_dict({"grid": [1, 2]})


def test_save_and_load(tmp_path):
    config = ExperimentConfig(ensemble="ft_elliptic", tau=0.2, k_p=1.5, n=16, threads=1,
                              grid=GridSpec(anchor=(0.1, 0.0)), suites=("params",))
    path = save_config(config, tmp_path / "nested" / "config.json")
    assert load_config(path) == config


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(broken)


def test_hash_ignores_seed_threads_and_output():
    base = ExperimentConfig(threads=1)
    digest = config_hash(base)
    assert len(digest) == 64
    assert config_hash(base.with_overrides(seed=99, threads=3, out="elsewhere")) == digest
    assert config_hash(base.with_overrides(tau=0.25)) != digest


def test_overrides_skip_none_and_map_out():
    base = ExperimentConfig(threads=1, seed=5)
    changed = base.with_overrides(seed=None, out="runs/a", n=32)
    assert changed.seed == 5
    assert changed.n == 32
    assert changed.output.directory == "runs/a"
    with pytest.raises(ConfigError):
        base.with_overrides(bogus=1)


def test_grid_pairs():
    grid = GridSpec(re_points=3, im_points=2)
    pairs = grid.pairs()
    assert len(pairs) == 6
    assert all(z1 == z2 for z1, z2 in pairs)
    anchored = GridSpec(re_points=2, im_points=2, anchor=[0.5, -0.5]).pairs()
    assert all(z2 == 0.5 - 0.5j for _, z2 in anchored)


def test_bins_and_output_validation():
    with pytest.raises(ConfigError):
        BinSpec(r_max=11.0)
    with pytest.raises(ConfigError):
        BinSpec(x_bins=0)
    with pytest.raises(ConfigError):
        OutputSettings(formats=("csv", "hdf5"))
    assert BinSpec().r_edges()[-1] == 3.0


def test_to_dict_is_json_ready():
    data = ExperimentConfig(threads=1).to_dict()
    assert json.loads(json.dumps(data))["output"]["formats"] == ["csv", "bin"]
