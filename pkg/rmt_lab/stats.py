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

Empirical spectral estimators and goodness-of-fit distances
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as scipy_stats
from scipy.spatial.distance import pdist

from rmt_lab.ensembles import SpectrumSample, make_generator
from rmt_lab.errors import DomainError
from rmt_lab.kernels import k_weak
from rmt_lab.params import semicircle_half_width, weak_scaling
from rmt_lab.quadrature import gauss_legendre

logger = logging.getLogger("rmt-lab.stats")

BOOTSTRAP_RESAMPLES = 200
LOCAL_WINDOW = 5.0
STRONG_INTENSITY = 1.0 / math.pi
WEAK_WINDOW = 0.2
MIN_WEAK_POINTS = 50


@dataclass(frozen=True)
class Histogram2D:
    """
    Binned eigenvalue density normalized per eigenvalue

    Attributes:
        x_edges (numpy.ndarray): Real-axis bin boundaries
        y_edges (numpy.ndarray): Imaginary-axis bin boundaries
        counts (numpy.ndarray): In-range counts, shape (len(x_edges)-1, len(y_edges)-1)
        n_samples (int): Number of spectra
        n_points (int): In-range eigenvalues, the sum of counts
        out_of_range (int): Eigenvalues outside the edges
        density (numpy.ndarray): counts / (all eigenvalues * bin area)
        se (numpy.ndarray): Standard error of density across spectra
    """

    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray
    n_samples: int
    n_points: int
    out_of_range: int
    density: np.ndarray
    se: np.ndarray

    @property
    def total(self):
        return self.n_points + self.out_of_range

    @property
    def centers(self):
        xc = (self.x_edges[:-1] + self.x_edges[1:]) / 2.0
        yc = (self.y_edges[:-1] + self.y_edges[1:]) / 2.0
        return np.meshgrid(xc, yc, indexing="ij")


@dataclass(frozen=True)
class Marginal1D:
    """Binned one-dimensional density normalized per selected eigenvalue"""

    edges: np.ndarray
    counts: np.ndarray
    n_samples: int
    n_points: int
    out_of_range: int
    density: np.ndarray
    se: np.ndarray

    @property
    def total(self):
        return self.n_points + self.out_of_range

    @property
    def centers(self):
        return (self.edges[:-1] + self.edges[1:]) / 2.0


@dataclass(frozen=True)
class LocalCorrelationEstimate:
    """
    Rescaled two-point function around a centre

    Attributes:
        center (complex): Z (strong) or X (weak)
        scale (float): Unfolding factor, sqrt(CN) or Nν(X)
        r_edges (numpy.ndarray): Separation bins in rescaled units
        g2 (numpy.ndarray): Normalized pair density per bin
        se (numpy.ndarray): Bootstrap standard errors over spectra
        target (numpy.ndarray, optional): Prediction averaged over each bin
        n_samples (int): Spectra used
        n_window (int): Eigenvalues inside the window over all spectra
    """

    center: complex
    scale: float
    r_edges: np.ndarray
    g2: np.ndarray
    se: np.ndarray
    target: Optional[np.ndarray]
    n_samples: int
    n_window: int


@dataclass(frozen=True)
class GofResult:
    ks: float
    l1: float
    chi2_p: float


@dataclass(frozen=True)
class BinDensityCheck:
    """Interior-bin comparison of a 2D density with a constant"""

    cv: float
    relative_deviation: np.ndarray
    z_scores: np.ndarray
    n_bins: int

    def passes(self, rel_tol=0.1, z_tol=3.0):
        """Every bin within rel_tol of the target or within z_tol standard errors"""
        ok = (np.abs(self.relative_deviation) <= rel_tol) | (np.abs(self.z_scores) <= z_tol)
        return bool(np.all(ok))


def _spectra(samples):
    """List of 1D complex arrays from SpectrumSamples, arrays or a single array"""
    if isinstance(samples, SpectrumSample):
        samples = [samples]
    elif isinstance(samples, np.ndarray) and samples.ndim == 1:
        samples = [samples]
    spectra = [np.asarray(s.eigenvalues if isinstance(s, SpectrumSample) else s, dtype=complex).ravel()
               for s in samples]
    if not spectra or sum(s.size for s in spectra) == 0:
        raise DomainError("No eigenvalues supplied")
    return spectra


def _check_edges(edges, name):
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise DomainError(f"{name} must be strictly increasing with at least two entries")
    return edges


def _per_sample_se(per_sample, pooled_counts, norm):
    """Standard error across spectra, Poisson for a single spectrum"""
    if len(per_sample) >= 2:
        return np.std(np.array(per_sample), axis=0, ddof=1) / math.sqrt(len(per_sample))
    return np.sqrt(pooled_counts) / norm


def esd_hist(samples, x_edges, y_edges):
    """
    2D histogram of all eigenvalues

    Args:
        samples: SpectrumSamples or complex arrays
        x_edges (array_like): Real-part bin edges
        y_edges (array_like): Imaginary-part bin edges

    Returns:
        Histogram2D
    """
    spectra = _spectra(samples)
    x_edges = _check_edges(x_edges, "x_edges")
    y_edges = _check_edges(y_edges, "y_edges")
    area = np.outer(np.diff(x_edges), np.diff(y_edges))

    counts = np.zeros(area.shape)
    per_sample = []
    total = 0
    for spectrum in spectra:
        c, _, _ = np.histogram2d(spectrum.real, spectrum.imag, bins=[x_edges, y_edges])
        counts += c
        total += spectrum.size
        per_sample.append(c / (spectrum.size * area))

    n_points = int(counts.sum())
    return Histogram2D(
        x_edges=x_edges,
        y_edges=y_edges,
        counts=counts.astype(np.int64),
        n_samples=len(spectra),
        n_points=n_points,
        out_of_range=total - n_points,
        density=counts / (total * area),
        se=_per_sample_se(per_sample, counts, total * area),
    )


def _marginal(values_per_sample, edges):
    widths = np.diff(edges)
    counts = np.zeros(widths.size)
    per_sample = []
    total = 0
    for values in values_per_sample:
        c, _ = np.histogram(values, bins=edges)
        counts += c
        total += values.size
        if values.size:
            per_sample.append(c / (values.size * widths))
    n_points = int(counts.sum())
    return Marginal1D(
        edges=edges,
        counts=counts.astype(np.int64),
        n_samples=len(values_per_sample),
        n_points=n_points,
        out_of_range=total - n_points,
        density=counts / (total * widths),
        se=_per_sample_se(per_sample, counts, total * widths),
    )


def marginal_x(samples, edges):
    """Density of real parts, normalized per eigenvalue"""
    spectra = _spectra(samples)
    return _marginal([s.real for s in spectra], _check_edges(edges, "edges"))


def semicircle_pdf(x, c=1.0):
    """(C/2π) sqrt(4/C - x²) on |x| < 2/sqrt(C)"""
    x = np.asarray(x, dtype=float)
    return c / (2.0 * math.pi) * np.sqrt(np.clip(4.0 / c - x * x, 0.0, None))


def semicircle_cdf(x, c=1.0):
    """Distribution function of semicircle_pdf"""
    radius = semicircle_half_width(c)
    x = np.clip(np.asarray(x, dtype=float), -radius, radius)
    area = 0.5 * (x * np.sqrt(radius ** 2 - x * x) + radius ** 2 * np.arcsin(x / radius)) + radius ** 2 * math.pi / 4.0
    return np.clip(c / (2.0 * math.pi) * area, 0.0, 1.0)


def ks_distance(values, cdf):
    """One-sample Kolmogorov-Smirnov distance of raw values to a CDF"""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise DomainError("ks_distance needs at least one value")
    return float(scipy_stats.kstest(values, cdf).statistic)


def off_axis_mass(samples, delta_band):
    """Fraction of eigenvalues with |Im z| > delta_band"""
    if not delta_band > 0.0:
        raise DomainError(f"delta_band must be positive, got {delta_band}")
    values = np.concatenate(_spectra(samples))
    return float(np.mean(np.abs(values.imag) > delta_band))


def _bin_mass_1d(pdf, edges, order=16):
    return np.array([gauss_legendre(pdf, lo, hi, order) for lo, hi in zip(edges[:-1], edges[1:])])


def _bin_mass_2d(pdf, x_edges, y_edges, order=8):
    mass = np.empty((x_edges.size - 1, y_edges.size - 1))
    for i, (x0, x1) in enumerate(zip(x_edges[:-1], x_edges[1:])):
        for j, (y0, y1) in enumerate(zip(y_edges[:-1], y_edges[1:])):
            mass[i, j] = gauss_legendre(
                lambda x, y0=y0, y1=y1: np.array([gauss_legendre(lambda y: pdf(xi, y), y0, y1, order) for xi in x]),
                x0, x1, order,
            )
    return mass


def gof(binned, density):
    """
    Distances between binned data and an analytic density

    ks is the largest gap between the binned empirical and analytic CDFs
    (over the corner lattice for 2D histograms), l1 is Σ|ρ̂ - ρ| times the bin
    measure, and chi2_p is the Pearson χ² p-value over bins with positive
    expected count.

    Args:
        binned (Marginal1D or Histogram2D): Data
        density (callable): pdf(x) for 1D or pdf(x, y) for 2D, normalized to 1

    Returns:
        GofResult

    Raises:
        DomainError: If there is no data
    """
    if binned.total == 0:
        raise DomainError("gof needs nonempty data")
    if isinstance(binned, Histogram2D):
        expected_mass = _bin_mass_2d(density, binned.x_edges, binned.y_edges)
        observed_mass = binned.counts / binned.total
        gap = np.cumsum(np.cumsum(observed_mass - expected_mass, axis=0), axis=1)
        measure = np.outer(np.diff(binned.x_edges), np.diff(binned.y_edges))
    else:
        expected_mass = _bin_mass_1d(density, binned.edges)
        observed_mass = binned.counts / binned.total
        gap = np.cumsum(observed_mass - expected_mass)
        measure = np.diff(binned.edges)

    ks = float(np.max(np.abs(gap)))
    l1 = float(np.sum(np.abs(binned.density - expected_mass / measure) * measure))

    counts = binned.counts.ravel().astype(float)
    expected = expected_mass.ravel()
    keep = expected > 0.0
    if keep.sum() >= 2 and counts[keep].sum() > 0:
        f_exp = expected[keep] / expected[keep].sum() * counts[keep].sum()
        chi2_p = float(scipy_stats.chisquare(counts[keep], f_exp).pvalue)
    else:
        chi2_p = math.nan
    return GofResult(ks=ks, l1=l1, chi2_p=chi2_p)


def support_axes(samples, center, q_re, q_im, quantile=0.995):
    """
    Semi-axes of the ellipse q_re (Re w)² + q_im (Im w)² <= Q_q, w = z - center,
    with Q_q the quantile of the quadratic form over all eigenvalues

    Returns:
        tuple: (semi-axis along Re, semi-axis along Im)
    """
    values = np.concatenate(_spectra(samples)) - center
    form = q_re * values.real ** 2 + q_im * values.imag ** 2
    level = float(np.quantile(form, quantile))
    return math.sqrt(level / q_re), math.sqrt(level / q_im)


def bin_density_check(hist, target, region):
    """
    Compare interior bins of a Histogram2D with a constant density

    Args:
        hist (Histogram2D): Data
        target (float): Expected density, e.g. C/π
        region (callable): region(x, y) -> bool on bin centres selecting the bins

    Returns:
        BinDensityCheck
    """
    xc, yc = hist.centers
    mask = np.asarray(region(xc, yc), dtype=bool)
    if not mask.any():
        raise DomainError("No bins inside the requested region")
    density = hist.density[mask]
    se = hist.se[mask]
    with np.errstate(divide="ignore", invalid="ignore"):
        z_scores = np.where(se > 0.0, (density - target) / se, np.inf)
    return BinDensityCheck(
        cv=float(np.std(density) / np.mean(density)) if np.mean(density) > 0 else math.inf,
        relative_deviation=(density - target) / target,
        z_scores=z_scores,
        n_bins=int(mask.sum()),
    )


def _lens_area(r, radius):
    """Area of the intersection of two discs of the given radius at distance r"""
    r = np.clip(r, 0.0, 2.0 * radius)
    return 2.0 * radius ** 2 * np.arccos(r / (2.0 * radius)) - 0.5 * r * np.sqrt(4.0 * radius ** 2 - r * r)


def _pair_measure(r_edges, radius, weight=None):
    """∫_bin 2πr lens(r) w(r) dr, the measure of ordered pairs in the disc at separation r"""

    def integrand(r):
        value = 2.0 * math.pi * r * _lens_area(r, radius)
        return value if weight is None else value * weight(r)

    return np.array([gauss_legendre(integrand, lo, hi, 32) for lo, hi in zip(r_edges[:-1], r_edges[1:])])


def strong_pair_target(r):
    """1 - e^{-r²}, the rescaled Ginibre two-point function"""
    return 1.0 - np.exp(-np.asarray(r) ** 2)


def _window_inside_support(center, radius, support):
    theta = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    rim = center + radius * np.exp(1j * theta)
    return bool(np.all(support.contains(rim)))


def local_pair_correlation(samples, center, scale, r_edges, window=LOCAL_WINDOW, target=None,
                           support=None, seed=0, resamples=BOOTSTRAP_RESAMPLES, intensity=None):
    """
    Local two-point function at the rescaled separation r

    Eigenvalues are unfolded as w = (z - center)·scale and kept inside the
    disc |w| <= window. Ordered pair counts per bin are divided by ρ² times
    the pair measure of the disc, with ρ the rescaled intensity. When the
    intensity is known (1/π in strong-regime units) it is used directly.
    Otherwise ρ² is replaced by n(n-1)/area² per spectrum, which makes a
    Poisson process give g₂ = 1 but biases a repulsive process upward by
    the weight of its correlation hole.

    Args:
        samples: SpectrumSamples or complex arrays
        center (complex): Z or X
        scale (float): sqrt(CN) in the strong regime, Nν(X) in the weak regime
        r_edges (array_like): Separation bins, within [0, 2·window]
        window (float): Disc radius in rescaled units
        target (callable, optional): Predicted g₂(r), averaged over each bin
        support (EllipseSpec, optional): Limiting support; a window reaching
            outside it logs a warning
        seed (int): Bootstrap seed
        resamples (int): Bootstrap resamples over whole spectra
        intensity (float, optional): Known rescaled intensity ρ

    Returns:
        LocalCorrelationEstimate
    """
    spectra = _spectra(samples)
    r_edges = _check_edges(r_edges, "r_edges")
    if r_edges[0] < 0.0 or r_edges[-1] > 2.0 * window:
        raise DomainError(f"r_edges must lie in [0, {2.0 * window}]")
    if not scale > 0.0:
        raise DomainError(f"scale must be positive, got {scale}")
    if intensity is not None and not intensity > 0.0:
        raise DomainError(f"intensity must be positive, got {intensity}")
    if support is not None and not _window_inside_support(center, window / scale, support):
        logger.warning(f"Local window of radius {window / scale:.4g} around {center} reaches beyond the spectrum support")

    pair_counts = np.zeros((len(spectra), r_edges.size - 1))
    pair_norm = np.zeros(len(spectra))
    n_window = 0
    for i, spectrum in enumerate(spectra):
        w = (spectrum - center) * scale
        w = w[np.abs(w) <= window]
        n_window += w.size
        if w.size < 2:
            continue
        distances = pdist(np.column_stack([w.real, w.imag]))
        counts, _ = np.histogram(distances, bins=r_edges)
        pair_counts[i] = 2.0 * counts
        pair_norm[i] = w.size * (w.size - 1)

    measure = _pair_measure(r_edges, window)
    disc = math.pi * window ** 2
    if intensity is not None:
        # every spectrum contributes ρ²·area² to the normalization, windowed points or not
        pair_norm[:] = (intensity * disc) ** 2

    def estimate(counts, norm):
        total = norm.sum()
        if total == 0.0:
            return np.full(measure.size, np.nan)
        return counts.sum(axis=0) / total * disc ** 2 / measure

    g2 = estimate(pair_counts, pair_norm)
    rng = make_generator(seed)
    boot = np.empty((resamples, measure.size))
    for k in range(resamples):
        index = rng.integers(0, len(spectra), len(spectra))
        boot[k] = estimate(pair_counts[index], pair_norm[index])
    se = np.std(boot, axis=0, ddof=1)

    predicted = None
    if target is not None:
        predicted = _pair_measure(r_edges, window, target) / measure
    logger.debug(f"Pair correlation from {n_window} windowed eigenvalues in {len(spectra)} spectra")
    return LocalCorrelationEstimate(
        center=complex(center),
        scale=float(scale),
        r_edges=r_edges,
        g2=g2,
        se=se,
        target=predicted,
        n_samples=len(spectra),
        n_window=n_window,
    )


def weak_profile_density(y, alpha):
    """K_weak(iy, iy), the limiting density of rescaled imaginary parts"""
    y = np.asarray(y, dtype=float)
    return np.asarray(k_weak(1j * y, 1j * y, alpha)).real


def weak_profile(samples, x_center, alpha, c, y_edges, min_points=MIN_WEAK_POINTS):
    """
    Density of rescaled imaginary parts near a bulk point

    Eigenvalues with |Re z - X| <= 0.2/sqrt(C) are kept and mapped to
    y = Nν(X)·Im z, N being the size of each spectrum.

    Args:
        samples: SpectrumSamples or complex arrays drawn at τ_N of weak_scaling
        x_center (float): X
        alpha (float): α
        c (float): C
        y_edges (array_like): Bins in y
        min_points (int): Minimum number of selected eigenvalues

    Returns:
        Marginal1D: Compare with weak_profile_density through gof

    Raises:
        DomainError: If fewer than min_points eigenvalues fall in the window
    """
    spectra = _spectra(samples)
    scaling = weak_scaling(x_center, alpha, c)
    half_width = WEAK_WINDOW / math.sqrt(c)
    selected = []
    for spectrum in spectra:
        near = spectrum[np.abs(spectrum.real - x_center) <= half_width]
        selected.append(scaling.local_scale(spectrum.size) * near.imag)
    count = sum(s.size for s in selected)
    if count < min_points:
        raise DomainError(f"Only {count} eigenvalues within {half_width:.4g} of X = {x_center}; need {min_points}")
    return _marginal(selected, _check_edges(y_edges, "y_edges"))
