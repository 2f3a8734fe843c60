import numpy as np
import pytest

from lmglab.spinspace import BandedHermitianOperator
from lmglab.tridiag import (
    eigh_banded,
    hermitian_to_tridiagonal,
    jacobi_eigenvalues,
    tridiagonal_ql,
)


def random_banded(n, bandwidth, rng):
    diags = {0: rng.normal(size=n).astype(complex)}
    if bandwidth >= 1 and n > 1:
        diags[1] = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
    if bandwidth >= 2 and n > 2:
        diags[2] = rng.normal(size=n - 2) + 1j * rng.normal(size=n - 2)
    return BandedHermitianOperator(n, diags)


@pytest.mark.parametrize("n", [2, 3, 8, 25, 50])
def test_ql_matches_jacobi_on_random_tridiagonals(n):
    rng = np.random.default_rng(n)
    op = random_banded(n, 1, rng)
    w, _ = eigh_banded(op)
    w_jacobi = jacobi_eigenvalues(op.to_dense())
    scale = max(1.0, np.max(np.abs(w)))
    assert np.max(np.abs(w - w_jacobi)) <= 1e-11 * scale


@pytest.mark.parametrize("n,bandwidth", [(2, 1), (16, 1), (16, 2), (40, 2)])
def test_full_pipeline_against_lapack(n, bandwidth):
    rng = np.random.default_rng(10 * n + bandwidth)
    op = random_banded(n, bandwidth, rng)
    dense = op.to_dense()
    w, v = eigh_banded(op)
    scale = max(1.0, np.max(np.abs(w)))
    assert np.max(np.abs(w - np.linalg.eigvalsh(dense))) <= 1e-12 * scale
    # residuals and orthonormality
    assert np.max(np.abs(dense @ v - v * w[None, :])) <= 1e-11 * scale
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-11


def test_eigenvalues_ascend_with_stable_ties():
    op = BandedHermitianOperator(4, {0: np.array([2.0, 1.0, 2.0, 1.0], dtype=complex)})
    w, _ = eigh_banded(op)
    assert np.all(np.diff(w) >= 0.0)


def test_householder_reduces_to_tridiagonal():
    rng = np.random.default_rng(5)
    n = 12
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = a + a.conj().T
    d, t, q = hermitian_to_tridiagonal(a)
    assert np.max(np.abs(q.conj().T @ q - np.eye(n))) <= 1e-13
    tri = np.diag(d.astype(complex)) + np.diag(t, -1) + np.diag(t.conj(), 1)
    assert np.max(np.abs(q @ tri @ q.conj().T - a)) <= 1e-12 * np.max(np.abs(a))


def test_ql_handles_degenerate_clusters():
    # heavily degenerate spectrum (diagonal repeated) plus a weak coupling
    n = 30
    d = np.repeat([1.0, -1.0, 3.0], 10)
    e = np.full(n, 1e-3)
    e[-1] = 0.0
    w = np.eye(n, dtype=complex)
    dd = d.copy()
    tridiagonal_ql(dd, e.copy(), w)
    tri = np.diag(d) + np.diag(np.full(n - 1, 1e-3), 1) + np.diag(np.full(n - 1, 1e-3), -1)
    ref = np.linalg.eigvalsh(tri)
    assert np.max(np.abs(np.sort(dd) - ref)) <= 1e-12 * 3


def test_bandwidth_cap():
    op = BandedHermitianOperator(6, {0: np.zeros(6, dtype=complex)})
    op.diags = dict(op.diags)
    # fabricate an unsupported offset
    op.diags[3] = np.zeros(3, dtype=complex)
    with pytest.raises(ValueError):
        eigh_banded(op)
