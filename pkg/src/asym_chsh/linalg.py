"""Small dense complex linear algebra for qubit and two-qubit operators.

Everything here works on plain ``numpy`` arrays of shape ``(2, 2)`` or
``(4, 4)``.  The Hermitian eigensolver is a cyclic Jacobi method that also
accepts stacks of matrices, ``(..., n, n)``, so that parameter sweeps can be
diagonalised in one call.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError

HERMITIAN_TOL = 1e-10
UNIT_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
CLUSTER_GAP = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULI = {"i": IDENTITY, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


class SpectralDecomposition(NamedTuple):
    """Eigenvalues sorted non-increasing, eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)

    @property
    def max_eigenvalue(self):
        return self.eigenvalues[..., 0]

    @property
    def top_eigenvector(self) -> np.ndarray:
        return self.eigenvectors[..., :, 0]


def pauli(axis: str) -> np.ndarray:
    """Return a copy of the Pauli matrix for ``axis`` in ``{'x', 'y', 'z'}``.

    ``'i'`` is accepted for the identity.
    """
    try:
        return _PAULI[axis.lower()].copy()
    except KeyError:
        raise DomainError(f"unknown Pauli axis {axis!r}") from None


def as_unit_vector(direction, tol: float = UNIT_TOL) -> np.ndarray:
    n = np.asarray(direction, dtype=float)
    if n.shape != (3,):
        raise DomainError(f"direction must be a 3-vector, got shape {n.shape}")
    if abs(np.linalg.norm(n) - 1.0) > tol:
        raise DomainError(f"direction {n.tolist()} is not a unit vector")
    return n


def bloch_observable(direction) -> np.ndarray:
    """n . sigma for a unit Bloch vector n."""
    nx, ny, nz = as_unit_vector(direction)
    return nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators, Alice's factor first."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise DomainError(f"tensor expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def pauli_product(label: str) -> np.ndarray:
    """Two-qubit Pauli string such as ``'xz'`` (sigma_x on A, sigma_z on B)."""
    if len(label) != 2:
        raise DomainError(f"expected a two-letter Pauli label, got {label!r}")
    return tensor(pauli(label[0]), pauli(label[1]))


def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - np.swapaxes(m.conj(), -1, -2))))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(m) <= tol


def _check_square(m: np.ndarray) -> None:
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {m.shape}")


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    # Annihilate a[p, q] with the unitary diag(1, conj(e)) @ [[c, s], [-s, c]]
    # acting on the (p, q) plane, where e is the phase of a[p, q].
    apq = a[:, p, q]
    r = np.abs(apq)
    active = r > 1e-100
    if not np.any(active):
        return
    safe_r = np.where(active, r, 1.0)
    e = np.where(active, apq / safe_r, 1.0)
    tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_r)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    t = sign / (np.abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    c = np.where(active, c, 1.0)
    s = np.where(active, s, 0.0)
    ec = e.conj()

    c_ = c[:, None]
    s_ = s[:, None]
    # columns: A <- A V
    col_p = a[:, :, p].copy()
    col_q = a[:, :, q].copy()
    a[:, :, p] = c_ * col_p - (s * ec)[:, None] * col_q
    a[:, :, q] = s_ * col_p + (c * ec)[:, None] * col_q
    # rows: A <- V^dagger A
    row_p = a[:, p, :].copy()
    row_q = a[:, q, :].copy()
    a[:, p, :] = c_ * row_p - (s * e)[:, None] * row_q
    a[:, q, :] = s_ * row_p + (c * e)[:, None] * row_q
    a[:, p, q] = np.where(active, 0.0, a[:, p, q])
    a[:, q, p] = np.where(active, 0.0, a[:, q, p])

    vp = v[:, :, p].copy()
    vq = v[:, :, q].copy()
    v[:, :, p] = c_ * vp - (s * ec)[:, None] * vq
    v[:, :, q] = s_ * vp + (c * ec)[:, None] * vq


def _orthonormalize_clusters(values: np.ndarray, vecs: np.ndarray) -> None:
    # Modified Gram-Schmidt restricted to eigenvalue clusters.
    n = values.shape[-1]
    for j in range(n):
        for i in range(j):
            same = np.abs(values[:, i] - values[:, j]) < CLUSTER_GAP
            if not np.any(same):
                continue
            overlap = np.einsum("bk,bk->b", vecs[:, :, i].conj(), vecs[:, :, j])
            vecs[:, :, j] -= np.where(same, overlap, 0.0)[:, None] * vecs[:, :, i]
        vecs[:, :, j] /= np.linalg.norm(vecs[:, :, j], axis=-1)[:, None]


def eig_hermitian(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix (or a stack of them).

    Cyclic complex Jacobi rotations are applied until the off-diagonal
    Frobenius norm drops below ``tol`` or ``max_sweeps`` is reached.
    Eigenvalues come back sorted non-increasing; inside a cluster of nearly
    equal eigenvalues the basis is arbitrary but orthonormal.
    """
    m = np.asarray(m, dtype=complex)
    _check_square(m)
    err = hermiticity_error(m)
    if err > HERMITIAN_TOL:
        raise DomainError(f"matrix is not Hermitian (max |m - m^H| = {err:.3e})")

    batch_shape = m.shape[:-2]
    n = m.shape[-1]
    a = m.reshape(-1, n, n).copy()
    a = 0.5 * (a + np.swapaxes(a.conj(), -1, -2))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()

    for _ in range(max_sweeps):
        if np.all(_offdiag_norm(a) < tol):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)

    values = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    order = np.argsort(-values, axis=-1, kind="stable")
    values = np.take_along_axis(values, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    _orthonormalize_clusters(values, v)
    return SpectralDecomposition(values.reshape(*batch_shape, n), v.reshape(*batch_shape, n, n))


def max_eigenvalue(m) -> np.ndarray | float:
    vals = eig_hermitian(m).eigenvalues[..., 0]
    return float(vals) if np.ndim(vals) == 0 else vals


def trace_product_bound_check(a, b, tol: float = 1e-9) -> bool:
    """Check tr(ab) <= sum_i lambda_i(a) lambda_i(b) with both spectra sorted."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    lhs = np.trace(a @ b).real
    rhs = float(np.dot(eig_hermitian(a).eigenvalues, eig_hermitian(b).eigenvalues))
    return bool(lhs <= rhs + tol)
