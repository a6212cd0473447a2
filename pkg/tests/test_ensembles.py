import logging
import math

import numpy as np
import pytest

from rmt_lab.cmatrix import ComplexMatrix
from rmt_lab.errors import ConfigError, DomainError, SamplerError
from rmt_lab.ensembles import (
    ChainSettings,
    SamplerConfig,
    SpectrumSample,
    coulomb_pair_moment,
    draw_spectra,
    elliptic_entries,
    ft_ginibre_entries,
    gue_entries,
    mcmc_coulomb,
    mcmc_ft_elliptic,
    mcmc_trace_squared,
    pab_entries,
    sample_ft_ginibre,
    sample_gue,
    sample_pab,
    split_chain_check,
    trace_jj,
)
from rmt_lab.params import ModelParams, covariance_pab


def _config(tau=0.3, gamma=0.0, k_p=1.0, n=6, seed=11, **chain):
    settings = {"burn_in": 200, "thin": 2}
    settings.update(chain)
    return SamplerConfig(ModelParams(tau=tau, gamma=gamma, k_p=k_p, n=n), seed=seed,
                         chain=ChainSettings(**settings))


def test_chain_settings_validation():
    with pytest.raises(ConfigError):
        ChainSettings(step_size=0.0)
    with pytest.raises(ConfigError):
        ChainSettings(burn_in=-1)
    with pytest.raises(ConfigError):
        ChainSettings(target_accept=1.0)
    with pytest.raises(ConfigError):
        ChainSettings(proposal="hamiltonian")
    assert ChainSettings().thin_for(16) == 16
    assert ChainSettings(thin=3).thin_for(16) == 3


def test_seed_must_be_unsigned_64_bit():
    with pytest.raises(ConfigError):
        SamplerConfig(ModelParams(tau=0.1), seed=-1)
    with pytest.raises(ConfigError):
        SamplerConfig(ModelParams(tau=0.1), seed=2 ** 64)


def test_gue_is_hermitian_with_unit_scale(rng):
    batch = gue_entries(20, rng, size=200)
    np.testing.assert_allclose(batch, np.conj(np.swapaxes(batch, -1, -2)))
    # E Tr J² = N · (1/2N) + N(N-1) · (1/2N) = N/2
    assert trace_jj(batch).mean() == pytest.approx(10.0, rel=0.02)
    assert isinstance(sample_gue(4, seed=1), ComplexMatrix)


def test_elliptic_correlation(rng):
    tau = 0.6
    batch = elliptic_entries(30, tau, rng, size=200)
    upper = np.triu_indices(30, 1)
    jk = batch[:, upper[0], upper[1]]
    kj = batch[:, upper[1], upper[0]]
    assert np.mean(jk * kj).real * 30 == pytest.approx(tau, abs=0.02)
    assert np.mean(np.abs(jk) ** 2) * 30 == pytest.approx(1.0, abs=0.02)


def test_pab_entry_covariances(params, rng):
    cov = covariance_pab(params)
    batch = pab_entries(cov, rng, size=20000)
    jk, kj = batch[:, 0, 1], batch[:, 1, 0]
    diag = batch[:, 0, 0]
    se = 5.0 / math.sqrt(batch.shape[0])
    assert np.var(jk.real) == pytest.approx(cov.var_off, abs=se * 2 * cov.var_off)
    assert np.var(jk.imag) == pytest.approx(cov.var_off, abs=se * 2 * cov.var_off)
    assert np.mean(jk.real * kj.real) == pytest.approx(cov.cov_real, abs=se * 2 * cov.var_off)
    assert np.mean(jk.imag * kj.imag) == pytest.approx(-cov.cov_real, abs=se * 2 * cov.var_off)
    assert np.var(diag.real) == pytest.approx(cov.var_diag_re, abs=se * 2 * cov.var_diag_re)
    assert np.var(diag.imag) == pytest.approx(cov.var_diag_im, abs=se * 2 * cov.var_diag_im)


def test_sample_pab_is_reproducible(params):
    config = SamplerConfig(params, seed=5)
    first = sample_pab(config).entries
    second = sample_pab(config).entries
    np.testing.assert_array_equal(first, second)


def test_fixed_trace_draws_sit_on_the_sphere(rng):
    batch = ft_ginibre_entries(7, 1.5, rng, size=50)
    np.testing.assert_allclose(trace_jj(batch), 7 * 1.5, rtol=1e-12)
    assert sample_ft_ginibre(5, 2.0, seed=3).trace_jj() == pytest.approx(10.0, rel=1e-12)


def test_spectrum_sample_validates_tag():
    with pytest.raises(DomainError):
        SpectrumSample(np.zeros(3), "wishart")
    sample = SpectrumSample(np.array([1.0, -1.0j]), "ginibre", seed=0)
    assert sample.n == 2
    assert sample.eigenvalues[0] == -1.0j


@pytest.mark.parametrize("tag", ["gue", "ginibre", "elliptic", "pab", "ft_ginibre"])
def test_exact_draws_do_not_depend_on_threads(tag):
    config = _config()
    serial = draw_spectra(tag, config, 6, threads=1)
    parallel = draw_spectra(tag, config, 6, threads=3)
    assert len(serial) == 6
    for a, b in zip(serial, parallel):
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
        assert a.ensemble_tag == tag


def test_gue_spectra_are_real():
    for sample in draw_spectra("gue", _config(n=10), 3):
        assert np.max(np.abs(sample.eigenvalues.imag)) < 1e-10


def test_ft_ginibre_trace_in_diagnostics():
    samples = draw_spectra("ft_ginibre", _config(k_p=2.0, n=5), 4)
    for sample in samples:
        assert sample.diagnostics["trace_jj"] == pytest.approx(10.0, rel=1e-10)


@pytest.mark.parametrize("tag", ["ft_elliptic", "trace_squared", "coulomb"])
def test_chain_draws_do_not_depend_on_threads(tag):
    config = _config(gamma=1.0 if tag != "ft_elliptic" else 0.0, chains=2)
    serial = draw_spectra(tag, config, 4, threads=1)
    parallel = draw_spectra(tag, config, 4, threads=2)
    assert len(serial) == 4
    for a, b in zip(serial, parallel):
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    assert {s.diagnostics["chain"] for s in serial} == {0, 1}


@pytest.mark.parametrize("proposal", ["pcn", "sphere", "geodesic"])
def test_fixed_trace_chain_stays_on_sphere(proposal):
    config = _config(tau=0.5, k_p=1.5, n=5, proposal=proposal)
    for state in mcmc_ft_elliptic(config, 5):
        assert state.trace_jj() == pytest.approx(7.5, rel=1e-10)


def test_trace_squared_chain_yields_matrices():
    config = _config(gamma=2.0, k_p=1.2, n=4)
    states = list(mcmc_trace_squared(config, 3))
    assert len(states) == 3
    assert all(isinstance(s, ComplexMatrix) and s.n == 4 for s in states)


def test_trace_squared_chain_rejects_foreign_proposal():
    with pytest.raises(SamplerError):
        list(mcmc_trace_squared(_config(gamma=1.0, proposal="geodesic"), 1))


def test_coulomb_chain_records_trace():
    samples = list(mcmc_coulomb(_config(n=5), 3))
    for sample in samples:
        assert sample.ensemble_tag == "coulomb"
        assert sample.diagnostics["trace_jj"] == pytest.approx(np.sum(np.abs(sample.eigenvalues) ** 2))


def test_acceptance_warning(caplog):
    config = _config(n=4, burn_in=0, step_size=1000.0)
    with caplog.at_level(logging.WARNING, logger="rmt-lab.ensembles"):
        list(mcmc_coulomb(config, 5))
    assert "acceptance rate" in caplog.text


def test_coulomb_pair_moment_ginibre_value():
    assert coulomb_pair_moment(0.0) == pytest.approx(1.5, rel=1e-8)


def test_coulomb_pair_moment_is_pulled_toward_target():
    free = coulomb_pair_moment(0.3)
    pulled = coulomb_pair_moment(0.3, gamma=5.0, k_p=3.0)
    assert pulled > free
    assert pulled == pytest.approx(6.0, rel=0.1)


def test_split_chain_check():
    rng = np.random.default_rng(0)
    stationary = rng.standard_normal(2000)
    assert split_chain_check(stationary) < 5.0
    drifting = np.concatenate([np.zeros(1000), np.ones(1000)]) + 0.01 * rng.standard_normal(2000)
    assert split_chain_check(drifting) > 10.0
    with pytest.raises(DomainError):
        split_chain_check([1.0, 2.0])


def test_draw_spectra_rejects_unknown_tag():
    with pytest.raises(ConfigError):
        draw_spectra("wishart", _config(), 2)
    with pytest.raises(DomainError):
        draw_spectra("gue", _config(), 0)
