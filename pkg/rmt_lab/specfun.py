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

Complex special functions: erfc, incomplete gamma ratios and their
uniform asymptotics, and physicists' Hermite polynomials
"""

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from rmt_lab.errors import ConvergenceError, DomainError, RecurrenceOverflowError

logger = logging.getLogger("rmt-lab.specfun")

DEFAULT_DELTA = math.pi / 100
HERMITE_MAX_DEGREE = 500

_EPS = np.finfo(float).eps
_TINY = 1e-300
_SERIES_MAX_ITER = 20000
_FRACTION_MAX_ITER = 20000


@dataclass(frozen=True)
class EtaValue:
    """Branch-resolved η = sqrt(2(z - 1 - log z))

    Attributes:
        z (complex): Argument
        eta (complex): η on the branch with the sign of z - 1 on the positive axis
        at_origin (bool): True for z = 0, where η = -inf and Q(w, wz) -> 1
    """

    z: complex
    eta: complex
    at_origin: bool = False

    @property
    def exponent(self):
        """Re(η²)/2, the decay rate of the uniform remainder"""
        if self.at_origin:
            return math.inf
        return (self.eta * self.eta).real / 2.0


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Argument must be finite")
    return arr


def _restore_shape(out, like):
    if np.ndim(like) == 0:
        return complex(out.reshape(-1)[0])
    return out.reshape(np.shape(like))


def _check_order(w):
    w = float(w)
    if not math.isfinite(w) or w <= 0.0:
        raise DomainError(f"Order w must be positive and finite, got {w}")
    return w


def erfc_complex(z):
    """
    Complementary error function for complex arguments

    Backed by the Faddeeva-function evaluation in scipy.special, whose
    relative accuracy is ~1e-13 across the plane.

    Args:
        z (complex or array_like): Finite argument(s)

    Returns:
        complex or numpy.ndarray: erfc(z)

    Raises:
        DomainError: If any argument is not finite
    """
    arr = _as_complex(z)
    return _restore_shape(np.atleast_1d(special.erfc(arr)), arr)


def _lower_series(w, z):
    """P(w, z) = exp(log_pref) * total for |z| < w + 1"""
    log_pref = w * np.log(z) - z - special.gammaln(w + 1.0)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for n in range(1, _SERIES_MAX_ITER):
        term = term * z / (w + n)
        total = total + term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            logger.debug(f"Incomplete gamma series converged after {n} terms")
            return log_pref, total
    raise ConvergenceError(f"Incomplete gamma series did not converge for w={w}",
                           iterations=_SERIES_MAX_ITER)


def _upper_fraction(w, z):
    """Q(w, z) = exp(log_pref) * h via the modified Lentz continued fraction"""
    b = z + 1.0 - w
    c = np.full_like(z, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _FRACTION_MAX_ITER):
        an = -i * (i - w)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= 4.0 * _EPS):
            logger.debug(f"Incomplete gamma continued fraction converged after {i} terms")
            log_pref = w * np.log(z) - z - special.gammaln(w)
            return log_pref, h
    raise ConvergenceError(f"Incomplete gamma continued fraction did not converge for w={w}",
                           iterations=_FRACTION_MAX_ITER)


def _finite_sum(m, z):
    """Q(m, z) = e^{-z} sum_{j<m} z^j/j!, summed backwards from the largest term"""
    ratio = np.ones_like(z)
    total = np.ones_like(z)
    for j in range(m - 1, 0, -1):
        ratio = ratio * j / z
        total = total + ratio
    log_pref = -z + (m - 1) * np.log(z) - special.gammaln(m)
    return log_pref, total


def _log_one_minus_exp(x):
    out = np.empty_like(x)
    small = x.real < -0.5
    out[small] = np.log1p(-np.exp(x[small]))
    large = ~small
    out[large] = x[large] + np.log(np.expm1(-x[large]))
    return out


def _evaluate(w, z, log=False, lower=False):
    """Shared regime switch behind gamma_q, log_gamma_q and gamma_p"""
    out = np.empty(z.shape, dtype=complex)
    zero = z == 0
    if lower:
        out[zero] = 0.0
    else:
        out[zero] = 0.0 if log else 1.0

    series = ~zero & (np.abs(z) < w + 1.0)
    far = ~zero & ~series
    finite = far & (z.real < 0.0) & float(w).is_integer()
    fraction = far & ~finite

    with np.errstate(over="ignore", under="ignore"):
        if series.any():
            log_pref, total = _lower_series(w, z[series])
            log_p = log_pref + np.log(total)
            if lower:
                out[series] = np.exp(log_p)
            elif log:
                out[series] = _log_one_minus_exp(log_p)
            else:
                out[series] = 1.0 - np.exp(log_p)

        for mask, evaluate in ((finite, lambda zz: _finite_sum(int(w), zz)),
                               (fraction, lambda zz: _upper_fraction(w, zz))):
            if not mask.any():
                continue
            log_pref, h = evaluate(z[mask])
            log_q = log_pref + np.log(h)
            if lower:
                out[mask] = -np.expm1(log_q)
            elif log:
                out[mask] = log_q
            else:
                out[mask] = np.exp(log_q)
    return out


def gamma_q(w, z):
    """
    Normalized upper incomplete gamma Q(w, z) = Γ(w, z)/Γ(w)

    Uses the power series for |z| < w + 1 and the Lentz continued fraction
    otherwise. For integer w and Re z < 0 outside the series disk the finite
    sum e^{-z} Σ_{j<w} z^j/j! is used, summed from its dominant term.

    Args:
        w (float): Order, w > 0
        z (complex or array_like): Argument(s), principal branch of z^w

    Returns:
        complex or numpy.ndarray: Q(w, z)

    Raises:
        DomainError: If w <= 0 or z is not finite
        ConvergenceError: If an expansion fails to converge
    """
    w = _check_order(w)
    arr = _as_complex(z)
    return _restore_shape(_evaluate(w, np.atleast_1d(arr).ravel()), arr)


def log_gamma_q(w, z):
    """
    Logarithm of Q(w, z), finite where Q itself over- or underflows

    The imaginary part is defined modulo 2π.
    """
    w = _check_order(w)
    arr = _as_complex(z)
    return _restore_shape(_evaluate(w, np.atleast_1d(arr).ravel(), log=True), arr)


def gamma_p(w, z):
    """Regularized lower incomplete gamma P(w, z) = 1 - Q(w, z)"""
    w = _check_order(w)
    arr = _as_complex(z)
    return _restore_shape(_evaluate(w, np.atleast_1d(arr).ravel(), lower=True), arr)


def _eta_series(u):
    # u = z - 1
    return u * (1.0 - u / 3.0 + 7.0 * u * u / 36.0 - 73.0 * u ** 3 / 540.0)


def _track_eta(r, theta):
    """Follow η continuously from z = 1 out to r, then round the arc to theta"""
    n_radial = max(16, int(math.ceil(abs(math.log(r)) / 0.01)))
    n_arc = max(16, int(math.ceil(abs(theta) / 0.01))) if theta != 0.0 else 0

    log_rho = np.linspace(0.0, math.log(r), n_radial + 1)[1:].astype(complex)
    phi = np.linspace(0.0, theta, n_arc + 1)[1:] if n_arc else np.empty(0)
    logs = np.concatenate([log_rho, math.log(r) + 1j * phi])
    points = np.exp(logs)
    roots = np.sqrt(2.0 * ((points - 1.0) - logs))

    eta = 0j
    for k in range(points.size):
        u = points[k] - 1.0
        reference = _eta_series(u) if abs(u) < 0.05 else eta
        candidate = roots[k]
        eta = candidate if abs(candidate - reference) <= abs(candidate + reference) else -candidate
    return complex(eta)


def eta_branch(z, arg=None, delta=DEFAULT_DELTA):
    """
    Branch-correct η for the uniform incomplete-gamma asymptotics

    η(1) = 0, η is real with the sign of z - 1 on the positive axis, and is
    continued analytically through the cut plane |arg z| <= 3π/2 - delta.

    Args:
        z (complex): Argument
        arg (float, optional): Argument of z on the extended sheet. Defaults to
            the principal value; pass it to reach π < |arg z| <= 3π/2 - delta
        delta (float): Guard distance from the branch boundary

    Returns:
        EtaValue: The resolved η

    Raises:
        DomainError: If |arg z| exceeds 3π/2 - delta or arg disagrees with z
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("eta_branch requires a finite argument")
    if z == 0:
        return EtaValue(z=0j, eta=complex(-math.inf, 0.0), at_origin=True)

    r = abs(z)
    if arg is None:
        theta = cmath.phase(z)
    else:
        theta = float(arg)
        if abs(cmath.rect(r, theta) - z) > 1e-12 * max(1.0, r):
            raise DomainError(f"arg={theta} is not an argument of z={z}")
    if abs(theta) > 1.5 * math.pi - delta:
        raise DomainError(f"|arg z| = {abs(theta):.6f} exceeds 3π/2 - δ = {1.5 * math.pi - delta:.6f}")

    u = z - 1.0
    if abs(u) < 1e-3 and abs(theta) < 0.5:
        return EtaValue(z=z, eta=complex(_eta_series(u)))

    if theta == 0.0:
        value = math.sqrt(max(0.0, 2.0 * (u.real - math.log1p(u.real))))
        return EtaValue(z=z, eta=complex(math.copysign(value, u.real)))

    return EtaValue(z=z, eta=_track_eta(r, theta))


def gamma_q_uniform(w, z, arg=None, delta=DEFAULT_DELTA):
    """
    Leading uniform approximation Q(w, wz) ≈ ½ erfc(η sqrt(w/2))

    The error is O(e^{-wη²/2}/sqrt(w)) uniformly across the transition z = 1.

    Args:
        w (float): Large parameter, w >= 10
        z (complex): Scaled argument
        arg (float, optional): Extended-sheet argument, see eta_branch
        delta (float): Branch guard

    Returns:
        complex: The uniform approximation of Q(w, wz)

    Raises:
        DomainError: If w < 10 or z violates the branch guard
    """
    w = float(w)
    if not w >= 10.0:
        raise DomainError(f"Uniform asymptotics need w >= 10, got {w}")
    value = eta_branch(z, arg=arg, delta=delta)
    if value.at_origin:
        return 1.0 + 0j
    return erfc_complex(value.eta * math.sqrt(w / 2.0)) / 2.0


def uniform_remainder(w, z):
    """
    Q(w, wz) - ½ erfc(η sqrt(w/2)) evaluated without cancellation

    When Q is close to 1 the identical quantity -(P(w, wz) - ½ erfc(-η sqrt(w/2)))
    is used instead, so the remainder keeps full relative accuracy.

    Args:
        w (float): Order, w >= 10
        z (complex): Scaled argument on the principal sheet

    Returns:
        complex: The remainder of the leading uniform term
    """
    w = float(w)
    if not w >= 10.0:
        raise DomainError(f"Uniform asymptotics need w >= 10, got {w}")
    value = eta_branch(z)
    if value.at_origin:
        return 0j
    zeta = value.eta * math.sqrt(w / 2.0)
    upper = gamma_q(w, w * complex(z))
    lower = gamma_p(w, w * complex(z))
    if abs(upper) <= abs(lower):
        return upper - erfc_complex(zeta) / 2.0
    return -(lower - erfc_complex(-zeta) / 2.0)


def hermite_h(k, z):
    """
    Physicists' Hermite polynomial H_k(z) by three-term recurrence

    Args:
        k (int): Degree, 0 <= k <= 500
        z (complex or array_like): Argument(s)

    Returns:
        complex or numpy.ndarray: H_k(z)

    Raises:
        DomainError: If k is negative, not an integer or above 500
        RecurrenceOverflowError: If the recurrence overflows
    """
    if int(k) != k or k < 0 or k > HERMITE_MAX_DEGREE:
        raise DomainError(f"Hermite degree must be an integer in [0, {HERMITE_MAX_DEGREE}], got {k}")
    k = int(k)
    arr = _as_complex(z)
    x = np.atleast_1d(arr).ravel()

    previous = np.ones_like(x)
    if k == 0:
        return _restore_shape(previous, arr)
    current = 2.0 * x
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, k):
            previous, current = current, 2.0 * x * current - 2.0 * j * previous
            if not np.all(np.isfinite(current)):
                raise RecurrenceOverflowError(
                    f"H_{j + 1} overflowed; evaluate kernels through kernels.kernel_finite_n, "
                    "which carries a scaled recurrence on weighted polynomials"
                )
    return _restore_shape(current, arr)
