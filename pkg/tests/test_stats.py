import logging
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from rmt_lab.ensembles import SpectrumSample, ginibre_entries
from rmt_lab.errors import DomainError
from rmt_lab.params import EllipseSpec
from rmt_lab.stats import (
    STRONG_INTENSITY,
    Marginal1D,
    bin_density_check,
    esd_hist,
    gof,
    ks_distance,
    local_pair_correlation,
    marginal_x,
    off_axis_mass,
    semicircle_cdf,
    semicircle_pdf,
    strong_pair_target,
    support_axes,
    weak_profile,
)


def _disc(rng, count, radius=1.0):
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * math.pi * rng.random(count)
    return r * np.exp(1j * theta)


def test_histogram_conserves_mass(rng):
    spectra = [_disc(rng, 50, radius=1.5) for _ in range(10)]
    hist = esd_hist(spectra, np.linspace(-1, 1, 9), np.linspace(-1, 1, 5))
    assert hist.total == 500
    assert hist.n_points + hist.out_of_range == 500
    assert hist.counts.sum() == hist.n_points
    area = np.outer(np.diff(hist.x_edges), np.diff(hist.y_edges))
    assert np.sum(hist.density * area) == pytest.approx(hist.n_points / hist.total)
    assert hist.se.shape == hist.counts.shape


def test_single_spectrum_uses_poisson_errors(rng):
    values = _disc(rng, 400)
    hist = esd_hist(values, np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    area = 0.25
    np.testing.assert_allclose(hist.se, np.sqrt(hist.counts) / (400 * area))


def test_histogram_accepts_samples(rng):
    sample = SpectrumSample(_disc(rng, 20), "ginibre")
    hist = esd_hist([sample, sample], [-2.0, 0.0, 2.0], [-2.0, 2.0])
    assert hist.n_samples == 2
    assert hist.total == 40


def test_estimators_reject_bad_input():
    with pytest.raises(DomainError):
        esd_hist([], [0.0, 1.0], [0.0, 1.0])
    with pytest.raises(DomainError):
        marginal_x(np.array([0.1 + 0.1j]), [1.0, 0.0])
    with pytest.raises(DomainError):
        off_axis_mass(np.array([0.1j]), 0.0)


def test_off_axis_mass():
    values = np.array([0.0, 0.05j, 0.2j, -0.3j, 1.0])
    assert off_axis_mass(values, 0.1) == pytest.approx(0.4)


def test_semicircle_normalization():
    for c in (0.5, 1.0, 2.0):
        radius = 2.0 / math.sqrt(c)
        x = np.linspace(-radius, radius, 20001)
        assert trapezoid(semicircle_pdf(x, c), x) == pytest.approx(1.0, abs=1e-5)
        assert semicircle_cdf(radius, c) == pytest.approx(1.0)
        assert semicircle_cdf(0.0, c) == pytest.approx(0.5)


def test_gof_zero_for_exact_counts():
    edges = np.linspace(0.0, 1.0, 21)
    centers = (edges[:-1] + edges[1:]) / 2.0
    values = np.repeat(centers, 50).astype(complex)
    fit = gof(marginal_x(values, edges), lambda x: np.ones_like(x))
    assert fit.ks < 1e-12
    assert fit.l1 < 1e-12
    assert fit.chi2_p == pytest.approx(1.0)


def test_gof_uniform_sample(rng):
    values = rng.random(10000).astype(complex)
    fit = gof(marginal_x(values, np.linspace(0.0, 1.0, 21)), lambda x: np.ones_like(x))
    assert fit.ks < 0.03
    assert fit.chi2_p > 1e-4


def test_gof_two_dimensional(rng):
    values = rng.random(20000) + 1j * rng.random(20000)
    edges = np.linspace(0.0, 1.0, 6)
    fit = gof(esd_hist(values, edges, edges), lambda x, y: np.ones_like(x))
    assert fit.ks < 0.02
    assert fit.l1 < 0.1


def test_gof_detects_wrong_radius(rng):
    # the real part of a uniform point in a disc of radius 2 is semicircle distributed with C = 1
    values = _disc(rng, 20000, radius=2.0).real
    assert ks_distance(values, lambda x: semicircle_cdf(x, 1.0)) < 0.02
    assert ks_distance(values, lambda x: semicircle_cdf(x, 2.0)) >= 0.08


def test_gof_needs_data():
    empty = Marginal1D(edges=np.array([0.0, 1.0]), counts=np.zeros(1, dtype=np.int64), n_samples=0,
                       n_points=0, out_of_range=0, density=np.zeros(1), se=np.zeros(1))
    with pytest.raises(DomainError):
        gof(empty, lambda x: np.ones_like(x))


def test_support_axes_of_a_disc(rng):
    values = _disc(rng, 40000)
    re_axis, im_axis = support_axes(values, 0.0, 1.0, 1.0)
    assert re_axis == pytest.approx(math.sqrt(0.995), abs=0.01)
    assert im_axis == pytest.approx(re_axis)


def test_bin_density_check_flat_disc(rng):
    spectra = [_disc(rng, 4000) for _ in range(40)]
    edges = np.linspace(-0.6, 0.6, 7)
    hist = esd_hist(spectra, edges, edges)
    check = bin_density_check(hist, 1.0 / math.pi, lambda x, y: x * x + y * y < 0.5)
    assert check.n_bins > 0
    assert check.cv < 0.1
    assert check.passes()
    with pytest.raises(DomainError):
        bin_density_check(hist, 1.0, lambda x, y: x > 10.0)


def test_poisson_points_have_flat_pair_correlation():
    rng = np.random.default_rng(2024)
    spectra = [_disc(rng, 100) for _ in range(200)]
    estimate = local_pair_correlation(spectra, 0.0, 10.0, np.linspace(0.2, 3.0, 8), seed=1)
    assert np.all(np.isfinite(estimate.g2))
    assert np.mean(estimate.g2) == pytest.approx(1.0, abs=0.08)
    assert np.all(np.abs(estimate.g2 - 1.0) < 5.0 * estimate.se)
    assert estimate.target is None
    assert estimate.n_samples == 200


def test_pair_correlation_target_and_support_warning(rng, caplog):
    spectra = [_disc(rng, 30) for _ in range(10)]
    support = EllipseSpec(q_re=1.0, q_im=1.0, bound=1.0, scale_c=1.0)
    with caplog.at_level(logging.WARNING, logger="rmt-lab.stats"):
        estimate = local_pair_correlation(spectra, 0.9, 10.0, [0.5, 1.0, 2.0],
                                          target=lambda r: np.ones_like(r), support=support, resamples=20)
    assert "beyond the spectrum support" in caplog.text
    np.testing.assert_allclose(estimate.target, 1.0)


def test_pair_correlation_rejects_wide_bins(rng):
    with pytest.raises(DomainError):
        local_pair_correlation([_disc(rng, 10)], 0.0, 1.0, [0.0, 11.0])


def test_ginibre_pair_correlation_with_known_intensity():
    rng = np.random.default_rng(7)
    spectra = list(np.linalg.eigvals(ginibre_entries(64, rng, size=300)))
    edges = np.linspace(0.2, 3.0, 8)
    known = local_pair_correlation(spectra, 0.0, 8.0, edges, window=3.0, target=strong_pair_target,
                                   seed=1, intensity=STRONG_INTENSITY)
    assert np.all(np.abs(known.g2 - known.target) < 4.0 * known.se)
    # the correlation hole lowers n(n-1), so the empirical normalization sits above
    empirical = local_pair_correlation(spectra, 0.0, 8.0, edges, window=3.0, seed=1)
    assert np.all(empirical.g2 > known.g2)


def test_pair_correlation_rejects_nonpositive_intensity(rng):
    with pytest.raises(DomainError):
        local_pair_correlation([_disc(rng, 10)], 0.0, 1.0, [0.5, 1.0], intensity=0.0)


def test_weak_profile_needs_enough_points():
    values = np.array([0.0 + 0.01j, 0.05 - 0.01j, 1.0 + 0.0j])
    with pytest.raises(DomainError):
        weak_profile(values, 0.0, 1.0, 1.0, np.linspace(-4.0, 4.0, 9))


def test_weak_profile_rescales_imaginary_parts():
    n = 100
    nu = 1.0 / math.pi
    values = np.full(n, 0.05 + 1j / (n * nu))
    profile = weak_profile(values, 0.0, 1.0, 1.0, [0.0, 0.5, 1.5, 2.0], min_points=10)
    np.testing.assert_array_equal(profile.counts, [0, n, 0])
