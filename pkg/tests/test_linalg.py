import numpy as np
import pytest

from asym_chsh.errors import DomainError
from asym_chsh.linalg import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Z,
    bloch_observable,
    eig_hermitian,
    pauli,
    tensor,
    trace_product_bound_check,
)
from conftest import random_hermitian


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_pauli_involution(axis):
    p = pauli(axis)
    assert np.allclose(p @ p, np.eye(2), atol=0)
    assert np.allclose(p, p.conj().T)
    assert np.trace(p) == 0


def test_pauli_entries():
    assert np.array_equal(pauli("z"), np.diag([1, -1]))
    assert np.array_equal(pauli("x"), [[0, 1], [1, 0]])
    with pytest.raises(DomainError):
        pauli("w")


def test_bloch_observable():
    assert np.array_equal(bloch_observable([0, 0, 1]), SIGMA_Z)
    assert np.array_equal(bloch_observable([1, 0, 0]), SIGMA_X)
    t = 0.3
    m = bloch_observable([np.cos(t), 0, np.sin(t)])
    assert np.allclose(m, np.cos(t) * SIGMA_X + np.sin(t) * SIGMA_Z, atol=1e-15)
    assert np.allclose(eig_hermitian(m).eigenvalues, [1, -1], atol=1e-12)


def test_bloch_observable_rejects_non_unit():
    with pytest.raises(DomainError):
        bloch_observable([0, 0, 1.1])


def test_tensor_examples():
    assert np.array_equal(tensor(IDENTITY, IDENTITY), np.eye(4))
    assert np.array_equal(tensor(SIGMA_Z, IDENTITY), np.diag([1, 1, -1, -1]))
    xz = tensor(SIGMA_X, SIGMA_Z)
    assert np.trace(xz) == 0
    assert np.array_equal(xz, xz.conj().T)
    assert np.array_equal(xz[:2, :2], np.zeros((2, 2)))
    assert np.array_equal(xz[:2, 2:], SIGMA_Z)


def test_tensor_rejects_wrong_dimension():
    with pytest.raises(DomainError):
        tensor(np.eye(4), np.eye(2))


def test_tensor_trace_and_bilinearity(rng):
    for _ in range(50):
        a, a2, b = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        c = rng.normal()
        assert abs(np.trace(tensor(a, b)) - np.trace(a) * np.trace(b)) < 1e-12
        assert np.allclose(tensor(a + c * a2, b), tensor(a, b) + c * tensor(a2, b), atol=1e-12)


def test_eig_diagonal():
    dec = eig_hermitian(np.diag([3.0, 1.0, 4.0, 1.0]))
    assert np.allclose(dec.eigenvalues, [4, 3, 1, 1], atol=0)


def test_eig_sigma_x():
    dec = eig_hermitian(SIGMA_X)
    assert np.allclose(dec.eigenvalues, [1, -1], atol=1e-15)
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(abs(np.vdot(plus, dec.eigenvectors[:, 0])) - 1) < 1e-12
    assert abs(abs(np.vdot(minus, dec.eigenvectors[:, 1])) - 1) < 1e-12


@pytest.mark.parametrize("n", [2, 4])
def test_eig_reconstruction_and_gram(rng, n):
    for _ in range(200):
        h = random_hermitian(rng, n)
        dec = eig_hermitian(h)
        assert np.max(np.abs(dec.reconstruct() - h)) < 1e-10
        v = dec.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-10
        assert np.all(np.diff(dec.eigenvalues) <= 0)
        # numpy's LAPACK solver as an independent check
        assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-10)


def test_eig_batched_matches_single(rng):
    stack = np.array([random_hermitian(rng, 4) for _ in range(20)]).reshape(4, 5, 4, 4)
    dec = eig_hermitian(stack)
    assert dec.eigenvalues.shape == (4, 5, 4)
    for idx in np.ndindex(4, 5):
        assert np.allclose(dec.eigenvalues[idx], eig_hermitian(stack[idx]).eigenvalues, atol=1e-12)


def test_eig_degenerate_cluster_is_orthonormal(rng):
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    h = u @ np.diag([2.0, 2.0, 2.0 + 1e-12, -1.0]) @ u.conj().T
    h = 0.5 * (h + h.conj().T)
    dec = eig_hermitian(h)
    v = dec.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(4))) < 1e-10
    assert np.max(np.abs(dec.reconstruct() - h)) < 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(DomainError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_rayleigh_oracle(rng):
    # sampled Rayleigh quotients never exceed lambda_max; power iteration
    # from the best sample reaches it
    for _ in range(10):
        h = random_hermitian(rng, 4)
        lam = eig_hermitian(h).eigenvalues[0]
        z = rng.normal(size=(10_000, 4)) + 1j * rng.normal(size=(10_000, 4))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        rq = np.einsum("ni,ij,nj->n", z.conj(), h, z).real
        assert rq.max() <= lam + 1e-12
        shift = np.abs(h).sum() + 1.0
        v = z[np.argmax(rq)]
        for _ in range(5000):
            v = (h + shift * np.eye(4)) @ v
            v /= np.linalg.norm(v)
        assert abs((v.conj() @ h @ v).real - lam) < 1e-6


def test_trace_bound_examples():
    assert trace_product_bound_check(SIGMA_Z, SIGMA_Z)
    assert trace_product_bound_check(SIGMA_Z, -SIGMA_Z)
    with pytest.raises(DomainError):
        trace_product_bound_check(SIGMA_Z, np.eye(4))


def test_trace_bound_random(rng):
    failures = 0
    for k in range(1000):
        n = 2 if k % 2 else 4
        failures += not trace_product_bound_check(random_hermitian(rng, n), random_hermitian(rng, n))
    assert failures == 0
