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

Model constants: the recentering constant K and its limits, the linearized
Gaussian scalars a(t), b, c, entry covariances, the limiting ellipse and
the weak-regime scalings
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate, optimize

from rmt_lab.errors import DomainError, EdgeError

logger = logging.getLogger("rmt-lab.params")

DEGENERATE_AXIS = 1e-8


@dataclass(frozen=True)
class ModelParams:
    """
    Ensemble parameters

    Attributes:
        tau (float): Non-Hermiticity parameter in (-1, 1)
        gamma (float): Strength of the trace-squared tilt, >= 0
        k_p (float): Target value of Tr JJ*/N, > 0
        n (int): Matrix size, >= 2
        t (float): Real linearization frequency entering a(t) = a - it
    """

    tau: float
    gamma: float = 0.0
    k_p: float = 1.0
    n: int = 2
    t: float = 0.0

    def __post_init__(self):
        _check_tau(self.tau)
        _check_gamma(self.gamma)
        _check_kp(self.k_p)
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"Matrix size must be an integer >= 2, got {self.n}")
        if not math.isfinite(self.t):
            raise DomainError(f"Linearization frequency t must be finite, got {self.t}")
        object.__setattr__(self, "n", int(self.n))

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


class EllipseSpec(NamedTuple):
    """Quadratic form q_re (Re Z)² + q_im (Im Z)² <= bound of the limiting support"""

    q_re: float
    q_im: float
    bound: float
    scale_c: float

    @property
    def semi_axes(self):
        return math.sqrt(self.bound / self.q_re), math.sqrt(self.bound / self.q_im)

    @property
    def degenerate(self):
        return min(self.semi_axes) < DEGENERATE_AXIS

    def quadratic_form(self, z):
        z = np.asarray(z)
        return self.q_re * z.real ** 2 + self.q_im * z.imag ** 2

    def contains(self, z, inflate=1.0):
        """Membership in the ellipse scaled by inflate along both axes"""
        return self.quadratic_form(z) <= self.bound * inflate ** 2


@dataclass(frozen=True)
class DerivedParams:
    """
    Scalars derived from ModelParams

    Attributes:
        k (float): Recentering constant K (0 for the fixed-trace ensembles)
        gamma_k (float): The product γK, or K_FT for the fixed-trace ensembles
        kbar (float): Weak-regime constant K̄ (K̄_FT for fixed trace)
        a_t (complex): a(t) = N(1/(1-τ²) + 2γK) - it
        b (float): τN/(1-τ²)
        c_at_sq (complex or None): (a(t)² - b²)/(2b); None when τ = 0
        c_weak (float): Weak-regime constant C
        c_kbar (float): 1 + 4γK̄
        ellipse (EllipseSpec): Strong-regime support
        scale_strong (float): Strong-regime constant C = 1/(1-τ²) + 2γK
        fixed_trace (bool): Whether γK was replaced by K_FT
    """

    k: float
    gamma_k: float
    kbar: float
    a_t: complex
    b: float
    c_at_sq: Optional[complex]
    c_weak: float
    c_kbar: float
    ellipse: EllipseSpec
    scale_strong: float
    fixed_trace: bool = False

    @property
    def a0(self):
        return self.a_t.real


@dataclass(frozen=True)
class PabCovariance:
    """Entry covariances of the linearized Gaussian ensemble P_{a,b}"""

    var_diag_re: float
    var_diag_im: float
    var_off: float
    cov_real: float
    n: int

    @property
    def lambda_plus_sq(self):
        return self.var_off + self.cov_real

    @property
    def lambda_minus_sq(self):
        return self.var_off - self.cov_real

    @property
    def mean_trace(self):
        """E[Tr JJ*]"""
        n = self.n
        return 2 * n * (n - 1) * self.var_off + n * (self.var_diag_re + self.var_diag_im)

    @property
    def var_trace(self):
        """Var[Tr JJ*] from the χ² decomposition"""
        n = self.n
        return (2 * n * (n - 1) * (self.lambda_plus_sq ** 2 + self.lambda_minus_sq ** 2)
                + 2 * n * (self.var_diag_re ** 2 + self.var_diag_im ** 2))

    def chi_square_terms(self):
        """(scale, degrees of freedom) pairs whose weighted χ² sum is Tr JJ*"""
        n = self.n
        return (
            (self.lambda_plus_sq, n * (n - 1)),
            (self.lambda_minus_sq, n * (n - 1)),
            (self.var_diag_re, n),
            (self.var_diag_im, n),
        )


def _check_tau(tau):
    if not -1.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (-1, 1), got {tau}")


def _check_gamma(gamma):
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise DomainError(f"gamma must be finite and >= 0, got {gamma}")


def _check_kp(k_p):
    if not (math.isfinite(k_p) and k_p > 0.0):
        raise DomainError(f"k_p must be finite and > 0, got {k_p}")


def recentering_residual(k, tau, gamma, k_p):
    """K_p + K - (1 + 2γK(1-τ²)) / (1 + 4γK + 4γ²K²(1-τ²))"""
    gk = gamma * k
    numerator = 1.0 + 2.0 * gk * (1.0 - tau * tau)
    denominator = (1.0 + 2.0 * gk * (1.0 - tau)) * (1.0 + 2.0 * gk * (1.0 + tau))
    return k_p + k - numerator / denominator


def _cubic(k, tau, gamma, k_p):
    s = 1.0 - tau * tau
    value = (4 * gamma ** 2 * s * k ** 3 + 4 * gamma * (1 + gamma * s * k_p) * k ** 2
             + (1 + 4 * gamma * k_p - 2 * gamma * s) * k + k_p - 1)
    slope = (12 * gamma ** 2 * s * k ** 2 + 8 * gamma * (1 + gamma * s * k_p) * k
             + (1 + 4 * gamma * k_p - 2 * gamma * s))
    return value, slope


def solve_k(tau, gamma, k_p):
    """
    Recentering constant K: the rightmost real root of the cubic

    4γ²(1-τ²)K³ + 4γ(1+γ(1-τ²)K_p)K² + (1+4γK_p-2γ(1-τ²))K + K_p - 1 = 0

    bracketed to the right of the pole max{-1/(2γ(1-τ)), -1/(2γ(1+τ))} and
    solved by Brent's method, then polished with Newton steps.

    Args:
        tau (float): τ in (-1, 1)
        gamma (float): γ >= 0
        k_p (float): K_p > 0

    Returns:
        float: K
    """
    _check_tau(tau)
    _check_gamma(gamma)
    _check_kp(k_p)
    if gamma == 0.0:
        return 1.0 - k_p
    if k_p == 1.0:
        return 0.0

    pole = max(-1.0 / (2.0 * gamma * (1.0 - tau)), -1.0 / (2.0 * gamma * (1.0 + tau)))
    gap = 1e-9 * max(1.0, abs(pole))
    lo = pole + gap
    while recentering_residual(lo, tau, gamma, k_p) >= 0.0 and gap > 1e-300:
        gap /= 10.0
        lo = pole + gap
    hi = max(1.0, 2.0 * abs(1.0 - k_p))
    while recentering_residual(hi, tau, gamma, k_p) <= 0.0:
        hi *= 2.0

    k = optimize.brentq(recentering_residual, lo, hi, args=(tau, gamma, k_p),
                        xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)

    for _ in range(3):
        value, slope = _cubic(k, tau, gamma, k_p)
        if slope == 0.0:
            break
        candidate = k - value / slope
        if candidate <= pole or (abs(recentering_residual(candidate, tau, gamma, k_p))
                                 >= abs(recentering_residual(k, tau, gamma, k_p))):
            break
        k = candidate

    logger.debug(f"solve_k(tau={tau}, gamma={gamma}, k_p={k_p}) = {k!r}")
    return float(k)


def _stable_root_gap(gamma, k_p):
    """sqrt(u² + 16γ) - u with u = 4γK_p - 1, free of cancellation"""
    u = 4.0 * gamma * k_p - 1.0
    root = math.sqrt(u * u + 16.0 * gamma)
    if u > 0.0:
        return 16.0 * gamma / (root + u)
    return root - u


def kbar(gamma, k_p):
    """
    Weak-regime recentering constant
    K̄ = -K_p/2 - 1/(8γ) + sqrt(16γ²K_p² - 8γK_p + 16γ + 1)/(8γ)

    Returns the continuous limit 1 - K_p at γ = 0.
    """
    _check_gamma(gamma)
    _check_kp(k_p)
    if gamma == 0.0:
        return 1.0 - k_p
    return (_stable_root_gap(gamma, k_p) - 2.0) / (8.0 * gamma)


def c_weak(gamma, k_p):
    """C = 1/2 - 2γK_p + sqrt(16γ²K_p² - 8γK_p + 16γ + 1)/2"""
    _check_gamma(gamma)
    _check_kp(k_p)
    return _stable_root_gap(gamma, k_p) / 2.0


def k_ft(tau, k_p):
    """
    Fixed-trace constant K_FT = lim γK as γ -> ∞

    Rightmost real root of 4(1-τ²)K_p x² + (4K_p - 2(1-τ²))x + K_p - 1 = 0
    exceeding max{-1/(2(1-τ)), -1/(2(1+τ))}.
    """
    _check_tau(tau)
    _check_kp(k_p)
    s = 1.0 - tau * tau
    qa = 4.0 * s * k_p
    qb = 4.0 * k_p - 2.0 * s
    qc = k_p - 1.0
    bound = max(-1.0 / (2.0 * (1.0 - tau)), -1.0 / (2.0 * (1.0 + tau)))

    if qa < 1e-300:
        roots = [-qc / qb]
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            raise DomainError(f"No real fixed-trace constant for tau={tau}, k_p={k_p}")
        q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
        roots = [q / qa] + ([qc / q] if q != 0.0 else [])
    admissible = [r for r in roots if r > bound]
    if not admissible:
        raise DomainError(f"No admissible fixed-trace root for tau={tau}, k_p={k_p}")
    return float(max(admissible))


def kbar_ft(k_p):
    """τ -> 1 limit of k_ft, (K_p^{-1} - 1)/4"""
    _check_kp(k_p)
    return (1.0 / k_p - 1.0) / 4.0


def c_weak_ft(k_p):
    """Weak-regime constant of the fixed-trace ensembles, C = 1/K_p"""
    _check_kp(k_p)
    return 1.0 / k_p


def ellipse_strong(tau, gamma_k):
    """
    Strong-regime limiting support {q_re (Re Z)² + q_im (Im Z)² <= 1/C}

    Args:
        tau (float): τ in (-1, 1)
        gamma_k (float): The product γK, or K_FT for fixed trace; must exceed -1/(2(1+τ))

    Returns:
        EllipseSpec: (q_re, q_im, bound, scale_c); semi-minor axes below 1e-8 flag
        the ellipse as degenerate
    """
    _check_tau(tau)
    if not gamma_k > -1.0 / (2.0 * (1.0 + tau)):
        raise DomainError(f"gamma_k={gamma_k} must exceed -1/(2(1+tau)) = {-1.0 / (2.0 * (1.0 + tau))}")
    s = 1.0 - tau * tau
    q_re = (1.0 - tau + 2.0 * gamma_k * s) / (1.0 + tau + 2.0 * gamma_k * s)
    scale_c = 1.0 / s + 2.0 * gamma_k
    ellipse = EllipseSpec(q_re=q_re, q_im=1.0 / q_re, bound=1.0 / scale_c, scale_c=scale_c)
    if ellipse.degenerate:
        logger.warning(f"Limiting ellipse for tau={tau} is degenerate (semi-axes {ellipse.semi_axes})")
    return ellipse


def derive(params, fixed_trace=False):
    """
    Derived constants for a parameter set

    Args:
        params (ModelParams): Ensemble parameters
        fixed_trace (bool): Replace γK by K_FT (fixed-trace ensembles, γ = ∞)

    Returns:
        DerivedParams
    """
    tau, gamma, k_p, n = params.tau, params.gamma, params.k_p, params.n
    s = 1.0 - tau * tau
    if fixed_trace:
        k = 0.0
        gamma_k = k_ft(tau, k_p)
        kb = kbar_ft(k_p)
        c = c_weak_ft(k_p)
        c_kb = 1.0 + 4.0 * kb
    else:
        k = solve_k(tau, gamma, k_p)
        gamma_k = gamma * k
        kb = kbar(gamma, k_p)
        c = c_weak(gamma, k_p)
        c_kb = 1.0 + 4.0 * gamma * kb if gamma > 0.0 else 1.0

    a0 = n * (1.0 / s + 2.0 * gamma_k)
    b = tau * n / s
    if not a0 > abs(b):
        raise DomainError(f"P_(a,b) is not normalizable: a={a0}, b={b}")
    a_t = complex(a0, -params.t)
    c_at_sq = (a_t * a_t - b * b) / (2.0 * b) if b != 0.0 else None
    ellipse = ellipse_strong(tau, gamma_k)
    return DerivedParams(
        k=k,
        gamma_k=gamma_k,
        kbar=kb,
        a_t=a_t,
        b=b,
        c_at_sq=c_at_sq,
        c_weak=c,
        c_kbar=c_kb,
        ellipse=ellipse,
        scale_strong=ellipse.scale_c,
        fixed_trace=fixed_trace,
    )


def covariance_pab(params, fixed_trace=False):
    """
    Entry covariances of P_{a,b} with K = solve_k (or γK = K_FT)

    Returns:
        PabCovariance: σ²_{D,Re}, σ²_{D,Im}, σ_O², ρ and the χ² moments of Tr JJ*
    """
    tau, n = params.tau, params.n
    gamma_k = k_ft(tau, params.k_p) if fixed_trace else params.gamma * solve_k(tau, params.gamma, params.k_p)
    s = 1.0 - tau * tau
    denominator = 1.0 + 4.0 * gamma_k + 4.0 * gamma_k ** 2 * s
    return PabCovariance(
        var_diag_re=(1.0 + tau) / (2.0 * n * (1.0 + 2.0 * gamma_k * (1.0 + tau))),
        var_diag_im=(1.0 - tau) / (2.0 * n * (1.0 + 2.0 * gamma_k * (1.0 - tau))),
        var_off=(1.0 + 2.0 * gamma_k * s) / (2.0 * n * denominator),
        cov_real=tau / (2.0 * n * denominator),
        n=n,
    )


def trace_characteristic(cov, t):
    """
    E exp(it Tr JJ*) under P_{a,b}, the product of four χ² characteristic functions

    Args:
        cov (PabCovariance): Entry covariances
        t (float or array_like): Frequencies

    Returns:
        complex or numpy.ndarray
    """
    t = np.asarray(t, dtype=float)
    log_phi = np.zeros(t.shape, dtype=complex)
    for scale, dof in cov.chi_square_terms():
        log_phi = log_phi - 0.5 * dof * np.log1p(-2j * scale * t)
    phi = np.exp(log_phi)
    return complex(phi) if phi.ndim == 0 else phi


def tilt_expectation(params):
    """
    E_{a,b} exp(-γ(Tr JJ* - N(K_p + K))²) through the Hubbard-Stratonovich transform

    (4πγ)^{-1/2} ∫ E_{a,b} e^{it(Tr JJ* - N(K_p+K))} e^{-t²/(4γ)} dt, which stays
    O(1) in N because the recentred trace fluctuates on the unit scale.

    Returns:
        float: The expectation, 1 at γ = 0
    """
    gamma = params.gamma
    if gamma == 0.0:
        return 1.0
    cov = covariance_pab(params)
    center = params.n * (params.k_p + solve_k(params.tau, gamma, params.k_p))

    def integrand(t):
        return (trace_characteristic(cov, t) * np.exp(-1j * t * center - t * t / (4.0 * gamma))).real

    limit = math.sqrt(4.0 * gamma * 40.0)
    value, error = integrate.quad(integrand, 0.0, limit, limit=400, epsabs=1e-13, epsrel=1e-11)
    logger.debug(f"tilt_expectation quadrature error estimate {error:.2e}")
    return 2.0 * value / math.sqrt(4.0 * math.pi * gamma)


@dataclass(frozen=True)
class WeakScaling:
    """
    Weak non-Hermiticity scaling at a bulk point X

    Attributes:
        x (float): Anchor on the real axis
        alpha (float): Weak-regime parameter α
        c (float): Constant C
        nu (float): Semicircle density ν(X) = C/(2π) sqrt(4/C - X²)
    """

    x: float
    alpha: float
    c: float
    nu: float

    def tau_n(self, n):
        """τ_N = 1 - α²/(2Nν(X)²)"""
        return 1.0 - self.alpha ** 2 / (2.0 * n * self.nu ** 2)

    def local_scale(self, n):
        """Nν(X), the unfolding factor for local coordinates"""
        return n * self.nu

    @property
    def alpha_tilde(self):
        """Parameter of the finite-interval kernel form, α̃ = αC/ν(X)"""
        return self.alpha * self.c / self.nu


def semicircle_half_width(c):
    return 2.0 / math.sqrt(c)


def weak_scaling(x, alpha, c):
    """
    Weak-regime scalings at X

    Args:
        x (float): Bulk anchor, |x| < 2/sqrt(C)
        alpha (float): α > 0
        c (float): C > 0

    Returns:
        WeakScaling

    Raises:
        EdgeError: If |x| >= 2/sqrt(C)
    """
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not c > 0.0:
        raise DomainError(f"C must be positive, got {c}")
    if abs(x) >= semicircle_half_width(c):
        raise EdgeError(f"|X| = {abs(x)} is not inside the bulk (-{semicircle_half_width(c)}, {semicircle_half_width(c)})")
    nu = c / (2.0 * math.pi) * math.sqrt(4.0 / c - x * x)
    return WeakScaling(x=float(x), alpha=float(alpha), c=float(c), nu=nu)
