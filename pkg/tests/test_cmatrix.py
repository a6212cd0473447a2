import numpy as np
import pytest

from rmt_lab import cmatrix
from rmt_lab.cmatrix import (
    ComplexMatrix,
    Spectrum,
    available_backends,
    eigenvalues,
    hessenberg,
)
from rmt_lab.errors import DomainError


def _random_matrix(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def test_complex_matrix_validation():
    with pytest.raises(DomainError):
        ComplexMatrix(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        ComplexMatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))
    m = ComplexMatrix([[1.0, 2.0j], [0.0, -1.0]])
    assert m.n == 2
    assert m.trace_jj() == pytest.approx(6.0)
    assert m.frobenius_norm == pytest.approx(np.sqrt(6.0))


def test_spectrum_is_lexicographic():
    spectrum = Spectrum(np.array([1.0 + 1.0j, -2.0, 1.0 - 1.0j, 0.5j]))
    np.testing.assert_array_equal(spectrum.values, [-2.0, 0.5j, 1.0 - 1.0j, 1.0 + 1.0j])
    assert len(spectrum) == 4


@pytest.mark.parametrize("backend", ["lapack", "qr"])
@pytest.mark.parametrize("n", [1, 2, 5, 32])
def test_trace_identity(rng, backend, n):
    m = _random_matrix(rng, n)
    values = eigenvalues(m, backend=backend).values
    assert values.size == n
    assert abs(values.sum() - np.trace(m)) <= 1e-10 * max(1.0, np.linalg.norm(m))


def test_qr_agrees_with_lapack(rng):
    m = _random_matrix(rng, 24)
    np.testing.assert_allclose(eigenvalues(m, "qr").values, eigenvalues(m, "lapack").values, atol=1e-9)


def test_triangular_matrix_eigenvalues_are_diagonal():
    m = np.triu(np.arange(1, 17, dtype=complex).reshape(4, 4)) + np.diag([0.0, 1.0j, 2.0j, 3.0j])
    expected = np.sort_complex(np.diag(m))
    np.testing.assert_allclose(eigenvalues(m, "qr").values, expected, atol=1e-10)


def test_hessenberg_structure_and_similarity(rng):
    m = _random_matrix(rng, 8)
    h = hessenberg(m).entries
    assert np.all(np.tril(h, -2) == 0)
    assert np.trace(h) == pytest.approx(np.trace(m))
    assert np.linalg.norm(h) == pytest.approx(np.linalg.norm(m))


def test_dimension_limit(monkeypatch):
    monkeypatch.setattr(cmatrix, "MAX_DIMENSION", 4)
    with pytest.raises(DomainError):
        eigenvalues(np.eye(5))
    assert len(eigenvalues(np.eye(4))) == 4


def test_unknown_backend():
    with pytest.raises(DomainError):
        eigenvalues(np.eye(2), backend="magma")


def test_registered_backend_is_used(monkeypatch):
    monkeypatch.setitem(cmatrix._BACKENDS, "diag", lambda entries: np.diag(entries).copy())
    assert "diag" in available_backends()
    values = eigenvalues(np.diag([3.0, 1.0, 2.0]), backend="diag").values
    np.testing.assert_array_equal(values, [1.0, 2.0, 3.0])
