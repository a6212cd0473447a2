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

Dense complex matrices and their eigenvalues
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from rmt_lab.errors import ConvergenceError, DomainError

logger = logging.getLogger("rmt-lab.cmatrix")

MAX_DIMENSION = 2048
EXCEPTIONAL_SHIFT_PERIOD = 10


@dataclass(frozen=True)
class ComplexMatrix:
    """Square matrix of finite complex doubles"""

    entries: np.ndarray

    def __post_init__(self):
        data = np.array(self.entries, dtype=np.complex128, order="C")
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] < 1:
            raise DomainError(f"Expected a nonempty square matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DomainError("Matrix entries must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "entries", data)

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def frobenius_norm(self):
        return float(np.linalg.norm(self.entries))

    @property
    def trace(self):
        return complex(np.trace(self.entries))

    def trace_jj(self):
        """Tr JJ*, the squared Frobenius norm"""
        return float(np.vdot(self.entries, self.entries).real)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ordered lexicographically by (Re, Im)"""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128).ravel()
        values = values[np.lexsort((values.imag, values.real))]
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


def _as_matrix(m):
    return m if isinstance(m, ComplexMatrix) else ComplexMatrix(m)


def hessenberg(m):
    """
    Unitarily similar upper-Hessenberg form

    Args:
        m (ComplexMatrix or array_like): Input matrix

    Returns:
        ComplexMatrix: Upper-Hessenberg matrix with exact zeros below the subdiagonal
    """
    m = _as_matrix(m)
    if m.n <= 2:
        return m
    h = scipy.linalg.hessenberg(m.entries, check_finite=False)
    return ComplexMatrix(np.triu(h, -1))


def _givens(x, y):
    """c real, s complex with [[c, s], [-conj(s), c]] @ [x, y] = [r, 0]"""
    ax = abs(x)
    if ax == 0.0:
        return 0.0, 1.0 + 0j
    r = np.hypot(ax, abs(y))
    phase = x / ax
    return ax / r, phase * np.conj(y) / r


def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closest to d"""
    half_trace = (a + d) / 2.0
    root = np.sqrt(((a - d) / 2.0) ** 2 + b * c)
    first, second = half_trace + root, half_trace - root
    return first if abs(first - d) <= abs(second - d) else second


def _qr_eigenvalues(h):
    """Single-shift implicit QR on an upper-Hessenberg matrix"""
    h = np.array(h, dtype=np.complex128)
    n = h.shape[0]
    eps = np.finfo(float).eps
    norm = max(np.abs(h).max(), np.finfo(float).tiny)
    values = np.empty(n, dtype=np.complex128)
    budget = 30 * n
    spent = 0
    stalled = 0
    hi = n - 1

    while hi >= 0:
        lo = hi
        while lo > 0:
            scale = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if scale == 0.0:
                scale = norm
            if abs(h[lo, lo - 1]) <= eps * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1

        if lo == hi:
            values[hi] = h[hi, hi]
            hi -= 1
            stalled = 0
            continue

        spent += 1
        stalled += 1
        if spent > budget:
            raise ConvergenceError(
                f"QR iteration failed to converge after {budget} iterations; unresolved block [{lo}, {hi}]",
                block=(lo, hi),
                iterations=spent,
            )

        if stalled % EXCEPTIONAL_SHIFT_PERIOD == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1.0 + 1.0j)
            logger.debug(f"Exceptional shift on block [{lo}, {hi}]")
        else:
            shift = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])

        x = h[lo, lo] - shift
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                # chase the bulge sitting at (k + 1, k - 1)
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            c, s = _givens(x, y)
            first = max(lo, k - 1)
            rows = h[k:k + 2, first:hi + 1].copy()
            h[k, first:hi + 1] = c * rows[0] + s * rows[1]
            h[k + 1, first:hi + 1] = -np.conj(s) * rows[0] + c * rows[1]
            if k > lo:
                h[k + 1, k - 1] = 0.0
            last = min(k + 2, hi)
            cols = h[lo:last + 1, k:k + 2].copy()
            h[lo:last + 1, k] = c * cols[:, 0] + np.conj(s) * cols[:, 1]
            h[lo:last + 1, k + 1] = -s * cols[:, 0] + c * cols[:, 1]

    return values


def _lapack_backend(entries):
    try:
        return scipy.linalg.eigvals(entries, check_finite=False, overwrite_a=False)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"LAPACK eigenvalue iteration failed: {str(e)}") from e


def _qr_backend(entries):
    if entries.shape[0] == 1:
        return entries.reshape(1).copy()
    h = scipy.linalg.hessenberg(entries, check_finite=False)
    return _qr_eigenvalues(np.triu(h, -1))


_BACKENDS = {
    "lapack": _lapack_backend,
    "qr": _qr_backend,
}
DEFAULT_BACKEND = "lapack"


def register_backend(name, solver):
    """
    Register an eigenvalue backend

    Args:
        name (str): Backend key
        solver (callable): Maps a square complex ndarray to its eigenvalues
    """
    _BACKENDS[name] = solver


def available_backends():
    return sorted(_BACKENDS)


def eigenvalues(m, backend=None):
    """
    Eigenvalues of a general complex matrix

    Args:
        m (ComplexMatrix or array_like): Input matrix, n <= 2048
        backend (str, optional): "lapack" (default) or "qr", or any registered name

    Returns:
        Spectrum: Eigenvalues in (Re, Im) lexicographic order

    Raises:
        DomainError: If the matrix is invalid or too large
        ConvergenceError: If the iteration fails, carrying the unresolved block
    """
    m = _as_matrix(m)
    if m.n > MAX_DIMENSION:
        raise DomainError(f"Dimension {m.n} exceeds the supported maximum {MAX_DIMENSION}")
    name = backend or DEFAULT_BACKEND
    if name not in _BACKENDS:
        raise DomainError(f"Unknown eigenvalue backend '{name}'. Available: {', '.join(available_backends())}")
    values = _BACKENDS[name](np.array(m.entries))
    return Spectrum(values)
