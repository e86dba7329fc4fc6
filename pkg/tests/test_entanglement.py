import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asym_chsh.entanglement import (
    TwoQubitState,
    bell_state,
    concurrence,
    concurrence_from_kappa,
    concurrence_mixed,
    concurrence_pure,
    filter_decomposition,
    kappa_from_concurrence,
    local_unitary,
    marginal_z_expectation,
    random_pure_state,
    schmidt,
    spin_flip_overlap,
    werner_state,
)
from asym_chsh.errors import DomainError
from asym_chsh.linalg import IDENTITY, SIGMA_Z, tensor
from conftest import random_unitary

S = 1 / math.sqrt(2)

complex_vectors = st.lists(st.floats(-1, 1), min_size=8, max_size=8).filter(
    lambda v: np.linalg.norm(v) > 1e-3
).map(lambda v: (np.array(v[0::2]) + 1j * np.array(v[1::2])) / np.linalg.norm(v))


def test_state_validation():
    with pytest.raises(DomainError):
        TwoQubitState.pure([1, 0, 0])
    with pytest.raises(DomainError):
        TwoQubitState.pure([1, 1, 0, 0])
    with pytest.raises(DomainError):
        TwoQubitState.mixed(np.eye(4))
    with pytest.raises(DomainError):
        TwoQubitState.mixed(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(DomainError):
        TwoQubitState()


def test_serialization_round_trip(rng):
    pure = random_pure_state(rng)
    back = TwoQubitState.from_json(pure.to_json())
    assert np.array_equal(back.amplitudes, pure.amplitudes)
    assert len(json.loads(pure.to_json())) == 8
    mixed = werner_state(0.3)
    back = TwoQubitState.from_reals(mixed.to_reals())
    assert not back.is_pure and np.array_equal(back.density, mixed.density)
    assert len(mixed.to_reals()) == 32
    with pytest.raises(DomainError):
        TwoQubitState.from_reals([0.0] * 5)


def test_schmidt_examples():
    d = schmidt(TwoQubitState.pure([1, 0, 0, 0]))
    assert d.kappa_max == pytest.approx(1, abs=1e-12)
    assert concurrence_pure(TwoQubitState.pure([1, 0, 0, 0])) == pytest.approx(0, abs=1e-6)
    d = schmidt(bell_state("phi+"))
    assert d.kappa_max == pytest.approx(0.5, abs=1e-12)
    assert concurrence_pure(bell_state("psi-")) == pytest.approx(1, abs=1e-12)
    c = math.cos(0.3)
    s = math.sin(0.3)
    state = TwoQubitState.pure([c, 0, 0, s])
    assert schmidt(state).kappa_max == pytest.approx(c * c, abs=1e-12)
    assert concurrence_pure(state) == pytest.approx(math.sin(0.6), abs=1e-12)


@settings(max_examples=200)
@given(complex_vectors)
def test_schmidt_reassembles_and_is_ordered(psi):
    d = schmidt(psi)
    assert np.max(np.abs(d.reassemble() - psi)) < 1e-10
    assert d.coefficients[0] >= d.coefficients[1] >= -1e-15
    assert abs(sum(d.coefficients) - 1) < 1e-12
    ua, ub = d.local_bases
    assert np.allclose(ua.conj().T @ ua, IDENTITY, atol=1e-10)
    assert np.allclose(ub.conj().T @ ub, IDENTITY, atol=1e-10)


@settings(max_examples=200)
@given(complex_vectors)
def test_concurrence_two_routes(psi):
    via_schmidt = concurrence_pure(psi)
    assert 0 <= via_schmidt <= 1 + 1e-12
    assert abs(via_schmidt - spin_flip_overlap(psi)) < 1e-8
    assert abs(via_schmidt - 2 * abs(np.linalg.det(psi.reshape(2, 2)))) < 1e-8


def test_concurrence_local_unitary_invariance(rng):
    for _ in range(100):
        state = random_pure_state(rng)
        moved = local_unitary(state, random_unitary(rng), random_unitary(rng))
        assert abs(concurrence(moved) - concurrence(state)) < 1e-8


def test_kappa_concurrence_inverse():
    for c in np.linspace(0, 1, 21):
        k = kappa_from_concurrence(c)
        assert 0.5 <= k <= 1
        assert concurrence_from_kappa(k) == pytest.approx(c, abs=1e-7)


def test_mixed_concurrence_examples():
    assert concurrence_mixed(np.eye(4) / 4) == pytest.approx(0, abs=1e-12)
    assert concurrence_mixed(bell_state("phi+").density) == pytest.approx(1, abs=1e-6)
    for w in (0.1, 1 / 3, 0.5, 0.8):
        expected = max(0.0, (3 * w - 1) / 2)
        assert concurrence(werner_state(w)) == pytest.approx(expected, abs=1e-6)


def test_mixed_matches_pure_route(rng):
    for _ in range(50):
        state = random_pure_state(rng)
        assert abs(concurrence_mixed(state.density) - concurrence_pure(state)) < 1e-5


def test_filter_decomposition_reconstructs(rng):
    omega = np.array([1, 0, 0, 1], dtype=complex)
    for _ in range(100):
        state = random_pure_state(rng)
        r = filter_decomposition(state)
        assert np.max(np.abs(np.kron(r, IDENTITY) @ omega - state.amplitudes)) < 1e-12
        assert abs(np.trace(r @ r.conj().T) - 1) < 1e-12
        direct = state.expectation(tensor(SIGMA_Z, IDENTITY))
        assert abs(marginal_z_expectation(state) - direct) < 1e-12


def test_filter_requires_pure():
    with pytest.raises(DomainError):
        filter_decomposition(werner_state(0.5))
    with pytest.raises(DomainError):
        bell_state("omega")


def test_filter_examples(rng):
    assert np.allclose(filter_decomposition(bell_state("phi+")), IDENTITY / math.sqrt(2), atol=1e-15)
    r = filter_decomposition(TwoQubitState.pure([math.sqrt(0.8), 0, 0, math.sqrt(0.2)]))
    assert np.allclose(r, np.diag([math.sqrt(0.8), math.sqrt(0.2)]), atol=1e-15)
    for _ in range(50):
        state = random_pure_state(rng)
        r = filter_decomposition(state)
        vals = np.linalg.eigvalsh(r @ r.conj().T)[::-1]
        assert np.allclose(vals, schmidt(state).coefficients, atol=1e-10)


def test_marginal_bound(rng):
    assert marginal_z_expectation(bell_state("phi+")) == pytest.approx(0, abs=1e-15)
    assert marginal_z_expectation(TwoQubitState.pure([1, 0, 0, 0])) == pytest.approx(1, abs=1e-15)
    for _ in range(1000):
        state = random_pure_state(rng)
        assert marginal_z_expectation(state) <= 2 * schmidt(state).kappa_max - 1 + 1e-10
    # equality when the Schmidt basis on Alice's side is the z basis
    aligned = TwoQubitState.pure(np.kron(IDENTITY, random_unitary(rng)) @ [math.sqrt(0.7), 0, 0, math.sqrt(0.3)])
    assert marginal_z_expectation(aligned) == pytest.approx(2 * 0.7 - 1, abs=1e-12)
