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

Determinantal kernels of the linearized Gaussian ensemble at finite N, its
double-integral representation, and the strong and weak scaling limits
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import roots_hermite

from rmt_lab.errors import DomainError, EdgeError, RecurrenceOverflowError
from rmt_lab.params import derive, semicircle_half_width
from rmt_lab.quadrature import gauss_legendre_adaptive, tanh_sinh_2d
from rmt_lab.specfun import hermite_h, log_gamma_q

logger = logging.getLogger("rmt-lab.kernels")

REGIMES = ("finite_n_sum", "contour_oracle", "strong_limit", "weak_limit", "weak_prop")
CONTOUR_MAX_N = 100
MAX_DET_SIZE = 8
T_CAP_FACTOR = 10.0
LN2 = math.log(2.0)
RESCALE_EXPONENT = 100
# ln(1e16): Gaussian factors below this fraction of their peak are dropped
GAUSS_CUTOFF = 36.84


@dataclass(frozen=True)
class KernelContext:
    """
    Everything a kernel evaluator needs

    Attributes:
        a (complex): a(t), or â(t) for the fixed-trace ensembles
        b (float): τN/(1-τ²)
        n (int): Number of terms in the finite-N kernel
        regime_tag (str): One of REGIMES
        alpha (float, optional): α for weak_limit, α̃ for weak_prop
        x_global (float): Bulk anchor X for weak_prop
        c (float, optional): Constant C_K̄ for weak_prop
        derived (DerivedParams, optional): Source constants when built from ModelParams
    """

    a: complex
    b: float
    n: int
    regime_tag: str = "finite_n_sum"
    alpha: Optional[float] = None
    x_global: float = 0.0
    c: Optional[float] = None
    derived: Optional[object] = field(default=None, compare=False)

    def __post_init__(self):
        if self.regime_tag not in REGIMES:
            raise DomainError(f"Unknown kernel regime '{self.regime_tag}'. Available: {', '.join(REGIMES)}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"Kernel size n must be a positive integer, got {self.n}")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not self.a.real > abs(self.b):
            raise DomainError(f"Weight is not integrable: Re a = {self.a.real}, b = {self.b}")
        if self.regime_tag.startswith("weak"):
            if self.alpha is None or not self.alpha > 0.0:
                raise DomainError(f"{self.regime_tag} needs alpha > 0, got {self.alpha}")
        if self.regime_tag == "weak_prop":
            if self.c is None or not self.c > 0.0:
                raise DomainError(f"weak_prop needs C > 0, got {self.c}")
            if abs(self.x_global) >= semicircle_half_width(self.c):
                raise EdgeError(f"|X| = {abs(self.x_global)} is outside the bulk of C = {self.c}")
        if self.regime_tag in ("finite_n_sum", "contour_oracle") and self.n >= 2:
            cap = T_CAP_FACTOR * math.sqrt(math.log(self.n))
            if abs(self.a.imag) > cap:
                raise DomainError(f"|t| = {abs(self.a.imag)} exceeds 10 sqrt(log N) = {cap:.4f}")

    @property
    def t(self):
        return -self.a.imag

    @classmethod
    def from_params(cls, params, regime="finite_n_sum", alpha=None, fixed_trace=False, n=None, x_global=0.0):
        """
        Context for a parameter set

        Args:
            params (ModelParams): Ensemble parameters; params.t enters a(t)
            regime (str): Kernel regime
            alpha (float, optional): α (weak_limit) or α̃ (weak_prop)
            fixed_trace (bool): Use â(t) with γK = K_FT
            n (int, optional): Overrides params.n as the number of kernel terms
            x_global (float): Bulk anchor for weak_prop

        Returns:
            KernelContext
        """
        derived = derive(params, fixed_trace=fixed_trace)
        size = params.n if n is None else n
        a = derived.a_t if n is None else complex(derived.a_t.real * size / params.n, derived.a_t.imag)
        b = derived.b if n is None else derived.b * size / params.n
        return cls(a=a, b=b, n=size, regime_tag=regime, alpha=alpha, x_global=x_global,
                   c=derived.c_kbar, derived=derived)

    @classmethod
    def from_scalars(cls, a, b, n, regime="finite_n_sum"):
        return cls(a=a, b=b, n=n, regime_tag=regime)


@dataclass(frozen=True)
class KernelProfile:
    """
    Tabulated kernel values

    Attributes:
        grid (numpy.ndarray): (M, 2) complex point pairs (z1, z2)
        values (numpy.ndarray): Kernel values K(z1, z2)
        provenance (str): Regime tag that produced the values
        log_scale (numpy.ndarray): Binary exponent carried by the stabilized
            recurrence per point, zero for closed-form regimes
    """

    grid: np.ndarray
    values: np.ndarray
    provenance: str
    log_scale: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Kernel profile values must be finite")

    def __len__(self):
        return self.values.size


def _broadcast(z1, z2):
    z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    return z1, z2


def _finish(values, like):
    values = np.asarray(values).reshape(np.shape(like))
    return complex(values) if values.ndim == 0 else values


def weight_w(z, ctx):
    """
    W_{a(t)}(z) = exp(-a(t)|z|² + (b/2)(z² + z̄²)) in split form

    Returns:
        tuple: (log-magnitude, unit phase), each a float/complex or an array
    """
    z = np.asarray(z, dtype=complex)
    exponent = -ctx.a * np.abs(z) ** 2 + ctx.b * (z * z).real
    log_magnitude = exponent.real
    phase = np.exp(1j * exponent.imag)
    if z.ndim == 0:
        return float(log_magnitude), complex(phase)
    return log_magnitude, phase


def _log_sqrt_weight(z, a, b):
    return (-a * np.abs(z) ** 2 + b * (z * z).real) / 2.0


def _binary_exponent(*arrays):
    magnitude = np.zeros(arrays[0].shape)
    for arr in arrays:
        magnitude = np.maximum(magnitude, np.maximum(np.abs(arr.real), np.abs(arr.imag)))
    _, exponent = np.frexp(magnitude)
    return exponent.astype(np.int64)


def _ldexp(v, e):
    return np.ldexp(v.real, e) + 1j * np.ldexp(v.imag, e)


def _split(log_value):
    """exp(log_value) as mantissa * 2^exponent"""
    exponent = np.rint(log_value.real / LN2).astype(np.int64)
    return np.exp(log_value - exponent * LN2), exponent


def _hermite_scaled(z1, z2, a, b, n):
    """
    Σ_{j<n} ψ_j(cz1) ψ_j(cz̄2) √W(z1) √W(z2) with ψ_j = C_j H_j

    ψ_j = 2x s_j ψ_{j-1} - 2(j-1) s_j s_{j-1} ψ_{j-2}, s_j = sqrt(b/(2aj)),
    carried as mantissas with a shared binary exponent per point.
    """
    c = cmath.sqrt((a * a - b * b) / (2.0 * b))
    x1, x2 = c * z1, c * np.conj(z2)
    c0 = cmath.sqrt(cmath.sqrt(a * a - b * b) / math.pi)

    cur1, e1 = _split(_log_sqrt_weight(z1, a, b))
    cur2, e2 = _split(_log_sqrt_weight(z2, a, b))
    cur1, cur2 = c0 * cur1, c0 * cur2
    prev1, prev2 = np.zeros_like(cur1), np.zeros_like(cur2)

    total = cur1 * cur2
    total_e = e1 + e2
    s_prev = 0j
    high, low = 2.0 ** RESCALE_EXPONENT, 2.0 ** -RESCALE_EXPONENT

    def rescale(cur, prev, exponent):
        magnitude = np.maximum(np.abs(cur), np.abs(prev))
        mask = (magnitude > high) | ((magnitude < low) & (magnitude > 0.0))
        if not np.any(mask):
            return cur, prev, exponent
        shift = np.where(mask, _binary_exponent(cur, prev), 0)
        return _ldexp(cur, -shift), _ldexp(prev, -shift), exponent + shift

    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for j in range(1, n):
            s_j = cmath.sqrt(b / (2.0 * a * j))
            back = 2.0 * (j - 1) * s_j * s_prev
            prev1, cur1 = cur1, 2.0 * s_j * x1 * cur1 - back * prev1
            prev2, cur2 = cur2, 2.0 * s_j * x2 * cur2 - back * prev2
            s_prev = s_j
            cur1, prev1, e1 = rescale(cur1, prev1, e1)
            cur2, prev2, e2 = rescale(cur2, prev2, e2)

            term = cur1 * cur2
            term_e = e1 + e2
            grow = term_e > total_e
            total = np.where(grow, _ldexp(total, np.where(grow, total_e - term_e, 0)), total)
            total_e = np.maximum(total_e, term_e)
            total = total + _ldexp(term, term_e - total_e)

            if not np.all(np.isfinite(total)):
                raise RecurrenceOverflowError(
                    f"Scaled Hermite recurrence produced non-finite values at degree {j} "
                    f"(n={n}, a={a}, b={b}); reduce n or move the points inside the bulk"
                )
    return total, total_e


def _monomial_scaled(z1, z2, a, n):
    """τ = 0: (a/π) exp(-a(|z1|² + |z2|²)/2 + x) Q(N, x), x = a z1 z̄2"""
    x = a * z1 * np.conj(z2)
    log_value = (cmath.log(a / math.pi) - a * (np.abs(z1) ** 2 + np.abs(z2) ** 2) / 2.0
                 + x + np.asarray(log_gamma_q(n, x)).reshape(x.shape))
    return _split(log_value)


def kernel_finite_n_scaled(z1, z2, ctx):
    """
    Finite-N kernel as (mantissa, binary exponent) pairs

    Returns:
        tuple: (numpy.ndarray of complex mantissas, numpy.ndarray of int exponents)
    """
    z1, z2 = _broadcast(z1, z2)
    flat1, flat2 = z1.ravel(), z2.ravel()
    if ctx.b == 0.0:
        mantissa, exponent = _monomial_scaled(flat1, flat2, ctx.a, ctx.n)
    else:
        mantissa, exponent = _hermite_scaled(flat1, flat2, ctx.a, ctx.b, ctx.n)
    return mantissa.reshape(z1.shape), exponent.reshape(z1.shape)


def kernel_finite_n(z1, z2, ctx):
    """
    K_{a(t)}(z1, z2) = Σ_{j<N} p_j(z1) p_j(z̄2) √W(z1) √W(z̄2)

    The planar Hermite polynomials p_j(z) = C_j H_j(c_{a(t)} z) are run
    through a scaled three-term recurrence on the weighted values. For τ = 0
    the monomial closed form with the incomplete gamma Q is used instead.

    Args:
        z1 (complex or array_like): First points
        z2 (complex or array_like): Second points, broadcast against z1
        ctx (KernelContext): Kernel constants

    Returns:
        complex or numpy.ndarray

    Raises:
        RecurrenceOverflowError: If the value is not representable despite scaling
    """
    mantissa, exponent = kernel_finite_n_scaled(z1, z2, ctx)
    with np.errstate(over="ignore", invalid="ignore"):
        values = _ldexp(mantissa, exponent)
    if not np.all(np.isfinite(values)):
        raise RecurrenceOverflowError(f"Kernel value overflows double precision (max exponent {exponent.max()})")
    return _finish(values, mantissa)


def _contour_single(z1, z2, ctx, rtol):
    a, b, n = ctx.a, ctx.b, ctx.n
    ratio = b / a
    c = cmath.sqrt((a * a - b * b) / (2.0 * b))
    alpha_p = (1.0 - ratio) / 2.0
    alpha_q = (1.0 + ratio) / 2.0
    r = b / (2.0 * a)
    shift_p = -1j * c * (z1 - z2.conjugate()) / (1.0 - ratio)
    shift_q = -1j * c * (z1 + z2.conjugate()) / (1.0 + ratio)

    # Q grows like e^{-ξ} where Re ξ < 0, which leaves a net decay of 1/2
    half_p = 1.5 * math.sqrt(GAUSS_CUTOFF / min(alpha_p.real, 0.5)) + abs(shift_p.real)
    half_q = 1.5 * math.sqrt(GAUSS_CUTOFF / min(alpha_q.real, 0.5)) + abs(shift_q.real)

    def integrand(p, q):
        xi = r * ((p + shift_p) ** 2 - (q + shift_q) ** 2)
        log_q = np.asarray(log_gamma_q(n, xi)).reshape(xi.shape)
        return np.exp(-alpha_p * p * p - alpha_q * q * q + log_q)

    value, error = tanh_sinh_2d(integrand, (-half_p, half_p), (-half_q, half_q), rtol=rtol)
    phi = (-a * (abs(z1) ** 2 + abs(z2) ** 2) / 2.0 + a * z1 * z2.conjugate()
           + 0.5j * b * ((z2 * z2).imag - (z1 * z1).imag))
    prefactor = cmath.sqrt(a * a - b * b) / (2.0 * math.pi ** 2)
    logger.debug(f"Contour kernel at ({z1}, {z2}): quadrature error {error:.2e}")
    return prefactor * cmath.exp(phi) * value


def kernel_contour(z1, z2, ctx, rtol=1e-10):
    """
    Double-integral representation of the finite-N kernel

    After Hermite integral representations and contour shifts by
    C_{z1,z2}-type constants the kernel reads

    √(a²-b²)/(2π²) e^Φ ∫∫ exp(-(a-b)p²/(2a) - (a+b)q²/(2a)) Q(N, b((p+P0)² - (q+Q0)²)/(2a)) dp dq

    evaluated by tensor tanh-sinh on a box where the Gaussian factor is
    below 1e-16 of its peak.

    Args:
        z1 (complex or array_like): First points
        z2 (complex or array_like): Second points
        ctx (KernelContext): Needs b != 0 and n <= 100
        rtol (float): Level-to-level tolerance of the quadrature

    Returns:
        complex or numpy.ndarray

    Raises:
        DomainError: If b = 0 or n > 100
        ConvergenceError: If the quadrature does not settle
    """
    if ctx.b == 0.0:
        raise DomainError("The contour representation needs b != 0 (tau != 0)")
    if ctx.n > CONTOUR_MAX_N:
        raise DomainError(f"The contour oracle is limited to N <= {CONTOUR_MAX_N}, got {ctx.n}")
    z1, z2 = _broadcast(z1, z2)
    values = np.array([_contour_single(complex(u), complex(v), ctx, rtol)
                       for u, v in zip(z1.ravel(), z2.ravel())], dtype=complex)
    return _finish(values, z1)


def k_strong(z1, z2):
    """Ginibre kernel (1/π) exp(-(|z1|² + |z2|²)/2 + z1 z̄2)"""
    z1, z2 = _broadcast(z1, z2)
    values = np.exp(-(np.abs(z1) ** 2 + np.abs(z2) ** 2) / 2.0 + z1 * np.conj(z2)) / math.pi
    return _finish(values, z1)


def _fourier_gauss(w, alpha, half_width, tol=1e-12):
    """∫_{-h}^{h} exp(-α²u²/2 + iuw) du for every w"""
    out = np.empty(w.size, dtype=complex)
    for i, wi in enumerate(w.ravel()):
        value, _ = gauss_legendre_adaptive(
            lambda u, wi=wi: np.exp(-0.5 * alpha * alpha * u * u + 1j * u * wi),
            -half_width, half_width, order=64, tol=tol,
        )
        out[i] = value
    return out.reshape(w.shape)


def k_weak(z1, z2, alpha):
    """
    Weak non-Hermiticity kernel

    (√2/(√π α)) exp(-(y1² + y2²)/α²) (1/2π) ∫_{-π}^{π} exp(-α²u²/2 + iu(z1 - z̄2)) du

    Args:
        z1 (complex or array_like): First local points x1 + iy1
        z2 (complex or array_like): Second local points
        alpha (float): α > 0

    Returns:
        complex or numpy.ndarray
    """
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    z1, z2 = _broadcast(z1, z2)
    integral = _fourier_gauss(z1 - np.conj(z2), alpha, math.pi)
    prefactor = math.sqrt(2.0) / (math.sqrt(math.pi) * alpha)
    values = prefactor * np.exp(-(z1.imag ** 2 + z2.imag ** 2) / alpha ** 2) * integral / (2.0 * math.pi)
    return _finish(values, z1)


def k_weak_prop(x_global, z1_local, z2_local, alpha_tilde, c):
    """
    Finite-interval weak kernel at a bulk point X

    (1/π) exp(-(y1² + y2²)/α̃² + iX(y1 - y2)/2) (1/(√(2π) α̃))
    ∫_{-h}^{h} exp(-α̃²u²/2 + iu(x1 - x2) - u(y1 + y2)) du, h = ½ sqrt(4/C - X²)

    Raises:
        EdgeError: If |X| >= 2/sqrt(C)
    """
    if not alpha_tilde > 0.0:
        raise DomainError(f"alpha_tilde must be positive, got {alpha_tilde}")
    if not c > 0.0:
        raise DomainError(f"C must be positive, got {c}")
    if abs(x_global) >= semicircle_half_width(c):
        raise EdgeError(f"|X| = {abs(x_global)} is outside the bulk (-{semicircle_half_width(c)}, {semicircle_half_width(c)})")
    z1, z2 = _broadcast(z1_local, z2_local)
    half_width = 0.5 * math.sqrt(4.0 / c - x_global ** 2)
    integral = _fourier_gauss(z1 - np.conj(z2), alpha_tilde, half_width)
    y1, y2 = z1.imag, z2.imag
    values = (np.exp(-(y1 ** 2 + y2 ** 2) / alpha_tilde ** 2 + 0.5j * x_global * (y1 - y2)) / math.pi
              * integral / (math.sqrt(2.0 * math.pi) * alpha_tilde))
    return _finish(values, z1)


def evaluate(z1, z2, ctx):
    """Dispatch to the evaluator of ctx.regime_tag"""
    if ctx.regime_tag == "finite_n_sum":
        return kernel_finite_n(z1, z2, ctx)
    if ctx.regime_tag == "contour_oracle":
        return kernel_contour(z1, z2, ctx)
    if ctx.regime_tag == "strong_limit":
        return k_strong(z1, z2)
    if ctx.regime_tag == "weak_limit":
        return k_weak(z1, z2, ctx.alpha)
    return k_weak_prop(ctx.x_global, z1, z2, ctx.alpha, ctx.c)


def kernel_profile(pairs, ctx, threads=1):
    """
    Tabulate a kernel on point pairs

    Args:
        pairs (array_like): (M, 2) complex array of (z1, z2)
        ctx (KernelContext): Regime and constants
        threads (int): Worker threads; chunks are reassembled in input order

    Returns:
        KernelProfile
    """
    pairs = np.asarray(pairs, dtype=complex).reshape(-1, 2)
    chunks = np.array_split(np.arange(pairs.shape[0]), max(1, min(threads, pairs.shape[0])))

    def run(index):
        z1, z2 = pairs[index, 0], pairs[index, 1]
        if ctx.regime_tag == "finite_n_sum":
            mantissa, exponent = kernel_finite_n_scaled(z1, z2, ctx)
            values = _ldexp(mantissa, exponent)
            return values, exponent.astype(float)
        return np.asarray(evaluate(z1, z2, ctx), dtype=complex).reshape(-1), np.zeros(index.size)

    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(run, chunks))
    values = np.concatenate([r[0] for r in results]) if results else np.empty(0, dtype=complex)
    log_scale = np.concatenate([r[1] for r in results]) if results else np.empty(0)
    logger.info(f"Tabulated {values.size} {ctx.regime_tag} kernel values")
    return KernelProfile(grid=pairs, values=values, provenance=ctx.regime_tag, log_scale=log_scale)


def rho_det(points, kernel):
    """
    k-point correlation det(K(z_i, z_j)) for k <= 8

    Args:
        points (array_like): k complex points
        kernel (callable): kernel(z1, z2) accepting broadcast arrays

    Returns:
        float or complex: Real when the imaginary part is at rounding level
    """
    points = np.asarray(points, dtype=complex).ravel()
    if not 1 <= points.size <= MAX_DET_SIZE:
        raise DomainError(f"rho_det supports 1 <= k <= {MAX_DET_SIZE} points, got {points.size}")
    matrix = np.asarray(kernel(points[:, None], points[None, :]), dtype=complex).reshape(points.size, points.size)
    value = complex(np.linalg.det(matrix))
    if abs(value.imag) <= 1e-14 * max(abs(value), np.finfo(float).tiny):
        return value.real
    return value


def hubbard_stratonovich_check(x, gamma):
    """
    |exp(-γx²) - (4πγ)^{-1/2} ∫ exp(ixt - t²/(4γ)) dt|

    The integral is folded onto [0, ∞) as a cosine transform and truncated
    where the Gaussian drops below e^{-40}.
    """
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    limit = math.sqrt(4.0 * gamma * 40.0)
    value, _ = integrate.quad(lambda t: math.exp(-t * t / (4.0 * gamma)), 0.0, limit,
                              weight="cos", wvar=x, epsabs=1e-15, epsrel=1e-13, limit=200)
    transform = 2.0 * value / math.sqrt(4.0 * math.pi * gamma)
    return abs(math.exp(-gamma * x * x) - transform)


def plane_rule(a, b, order):
    """
    Tensor Gauss-Hermite rule for ∫_ℂ f(z) W_{a,b}(z) dz with real a > |b|

    W_{a,b}(x + iy) = exp(-(a-b)x² - (a+b)y²), exact for polynomials of
    degree <= 2 order - 1 in each coordinate.

    Returns:
        tuple: (complex nodes, weights), flattened
    """
    if not a > abs(b):
        raise DomainError(f"plane_rule needs real a > |b|, got a={a}, b={b}")
    u, w = roots_hermite(order)
    x = u / math.sqrt(a - b)
    y = u / math.sqrt(a + b)
    nodes = (x[:, None] + 1j * y[None, :]).ravel()
    weights = (w[:, None] * w[None, :]).ravel() / math.sqrt((a - b) * (a + b))
    return nodes, weights


def planar_norm(a, b, k):
    """k! π (2a)^k / (√(a²-b²) b^k), the squared norm of H_k(cz)"""
    return math.factorial(k) * math.pi * (2.0 * a) ** k / (math.sqrt(a * a - b * b) * b ** k)


def planar_gram(a, b, kmax):
    """
    Gram matrix G[l, k] = ∫ H_l(cz) H_k(cz̄) W_{a,b}(z) dz for l, k <= kmax

    Returns:
        numpy.ndarray: (kmax + 1, kmax + 1) complex matrix, diagonal planar_norm(a, b, k)
    """
    if b == 0.0:
        raise DomainError("planar_gram needs b != 0")
    c = cmath.sqrt((a * a - b * b) / (2.0 * b))
    nodes, weights = plane_rule(a, b, kmax + 4)
    values = np.array([hermite_h(k, c * nodes) for k in range(kmax + 1)])
    conjugate = np.array([hermite_h(k, c * np.conj(nodes)) for k in range(kmax + 1)])
    return (values * weights) @ conjugate.T
