"""Small dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays and pure states are 1-D complex
arrays. Two-qubit objects use the basis ordering (HH, HV, VH, VV) with the
first (target) factor on the most-significant axis, which is exactly the
ordering produced by :func:`numpy.kron`.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
DENSITY_TOL = 1e-12
PSD_FLOOR = -1e-10

# single-qubit polarisation states
H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)
D = np.array([1, 1], dtype=complex) / np.sqrt(2)
A = np.array([1, -1], dtype=complex) / np.sqrt(2)
R = np.array([1, 1j], dtype=complex) / np.sqrt(2)
L = np.array([1, -1j], dtype=complex) / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


class NotHermitianError(ValueError):
    pass


def tensor_product(a, b, *rest):
    """Kronecker product ``a ⊗ b ⊗ ...``; works for vectors and matrices alike."""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for c in rest:
        out = np.kron(out, np.asarray(c, dtype=complex))
    return out


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def projector(psi):
    """|psi><psi| for a (not necessarily normalized) vector."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dag(m):
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.abs(m - dag(m)).max(initial=0.0) <= tol


def _check_hermitian(m, tol=HERMITIAN_TOL):
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if not is_hermitian(m, tol):
        raise NotHermitianError("matrix is not Hermitian within %g" % tol)


def hermitian_eig(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    evals : ndarray
        Real eigenvalues sorted in descending order.
    evecs : ndarray
        Orthonormal eigenvectors as columns, in the same order.
    """
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m)
    evals, evecs = np.linalg.eigh((m + dag(m)) / 2)
    return evals[::-1], evecs[:, ::-1]


def trace_norm(m):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    evals, _ = hermitian_eig(m)
    return float(np.abs(evals).sum())


def sqrtm_psd(m, cutoff=1e-13):
    """Principal square root of a PSD matrix.

    Eigenvalues below ``cutoff`` times the largest are round-off and set to zero.
    """
    evals, evecs = hermitian_eig(m)
    evals = np.where(evals > cutoff * max(evals[0], 0.0), evals, 0.0)
    evals = np.sqrt(evals)
    return (evecs * evals) @ dag(evecs)


def pinv_sqrtm_psd(m, rcond=1e-12):
    """Pseudo-inverse square root on the support of a PSD matrix."""
    evals, evecs = hermitian_eig(m)
    cut = rcond * max(evals.max(initial=0.0), 0.0)
    inv = np.where(evals > cut, 1 / np.sqrt(np.where(evals > cut, evals, 1.0)), 0.0)
    return (evecs * inv) @ dag(evecs)


def partial_trace(rho, dims, keep):
    """Reduced state of a bipartite density matrix.

    Parameters
    ----------
    rho : array_like
        ``(dA*dB, dA*dB)`` matrix.
    dims : tuple of int
        ``(dA, dB)``.
    keep : {"A", "B", 0, 1}
        Which subsystem survives.
    """
    rho = np.asarray(rho, dtype=complex)
    dA, dB = dims
    if rho.shape != (dA * dB, dA * dB):
        raise ValueError(f"state of shape {rho.shape} does not match dims {dims}")
    r = rho.reshape(dA, dB, dA, dB)
    if keep in ("A", 0):
        return np.einsum("ijkj->ik", r)
    if keep in ("B", 1):
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def density_from_ket(psi):
    return projector(normalize(psi))


def is_density_matrix(rho, tol=DENSITY_TOL, psd_floor=PSD_FLOOR):
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not np.all(np.isfinite(rho)):
        return False
    if np.abs(rho - dag(rho)).max() > tol:
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return np.linalg.eigvalsh((rho + dag(rho)) / 2).min() >= psd_floor


def check_density_matrix(rho, tol=DENSITY_TOL):
    rho = np.asarray(rho, dtype=complex)
    if not is_density_matrix(rho, tol):
        raise ValueError("not a valid density matrix")
    return rho


def rand_haar_state(dim, rng=None):
    rng = np.random.default_rng(rng)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def rand_hermitian(dim, rng=None):
    rng = np.random.default_rng(rng)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + dag(m)) / 2


def rand_unitary(dim, rng=None):
    rng = np.random.default_rng(rng)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def rand_density_matrix(dim, rank=None, rng=None):
    rng = np.random.default_rng(rng)
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho).real
