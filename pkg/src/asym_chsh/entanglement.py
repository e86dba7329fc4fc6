"""Two-qubit states, Schmidt decomposition and concurrence."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import HERMITIAN_TOL, SIGMA_Y, SIGMA_Z, eig_hermitian, hermiticity_error, tensor

NORM_TOL = 1e-10
PSD_TOL = 1e-9
SQRT_CLIP = 1e-12

SIGMA_YY = tensor(SIGMA_Y, SIGMA_Y)


class TwoQubitState:
    """Pure (amplitude vector) or mixed (density matrix) two-qubit state.

    Amplitudes are indexed as ``|ab>`` with Alice's qubit first, so
    ``amplitudes.reshape(2, 2)[a, b]`` is the coefficient of ``|a>|b>``.
    """

    def __init__(self, amplitudes=None, density=None):
        if (amplitudes is None) == (density is None):
            raise DomainError("give exactly one of amplitudes or density")
        if amplitudes is not None:
            psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
            if psi.shape != (4,):
                raise DomainError(f"pure state needs 4 amplitudes, got {psi.size}")
            norm = np.linalg.norm(psi)
            if abs(norm - 1.0) > NORM_TOL:
                raise DomainError(f"state vector has norm {norm:.12g}, expected 1")
            self._psi = psi.copy()
            self._rho = None
        else:
            rho = np.asarray(density, dtype=complex)
            if rho.shape != (4, 4):
                raise DomainError(f"density matrix must be 4x4, got {rho.shape}")
            if hermiticity_error(rho) > HERMITIAN_TOL:
                raise DomainError("density matrix is not Hermitian")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > NORM_TOL:
                raise DomainError(f"density matrix has trace {tr:.12g}, expected 1")
            if eig_hermitian(rho).eigenvalues[-1] < -PSD_TOL:
                raise DomainError("density matrix is not positive semidefinite")
            self._psi = None
            self._rho = rho.copy()

    @classmethod
    def pure(cls, amplitudes) -> "TwoQubitState":
        return cls(amplitudes=amplitudes)

    @classmethod
    def mixed(cls, density) -> "TwoQubitState":
        return cls(density=density)

    @property
    def is_pure(self) -> bool:
        return self._psi is not None

    @property
    def amplitudes(self) -> np.ndarray:
        if self._psi is None:
            raise DomainError("mixed state has no amplitude vector")
        return self._psi.copy()

    @property
    def density(self) -> np.ndarray:
        if self._rho is not None:
            return self._rho.copy()
        return np.outer(self._psi, self._psi.conj())

    def expectation(self, operator) -> float:
        op = np.asarray(operator, dtype=complex)
        if self._psi is not None:
            value = self._psi.conj() @ op @ self._psi
        else:
            value = np.trace(self._rho @ op)
        return float(value.real)

    def to_reals(self) -> list:
        data = self._psi if self._psi is not None else self._rho.reshape(-1)
        return np.column_stack([data.real, data.imag]).reshape(-1).tolist()

    @classmethod
    def from_reals(cls, values) -> "TwoQubitState":
        x = np.asarray(values, dtype=float)
        if x.size not in (8, 32):
            raise DomainError(f"expected 8 (pure) or 32 (mixed) reals, got {x.size}")
        z = x[0::2] + 1j * x[1::2]
        if z.size == 4:
            return cls.pure(z)
        return cls.mixed(z.reshape(4, 4))

    def to_json(self) -> str:
        return json.dumps(self.to_reals())

    @classmethod
    def from_json(cls, text: str) -> "TwoQubitState":
        return cls.from_reals(json.loads(text))

    def __repr__(self):
        kind = "pure" if self.is_pure else "mixed"
        return f"TwoQubitState({kind})"


def _as_state(state) -> TwoQubitState:
    if isinstance(state, TwoQubitState):
        return state
    arr = np.asarray(state)
    if arr.shape == (4, 4):
        return TwoQubitState.mixed(arr)
    return TwoQubitState.pure(arr)


def _require_pure(state) -> TwoQubitState:
    state = _as_state(state)
    if not state.is_pure:
        raise DomainError("operation requires a pure state")
    return state


@dataclass(frozen=True)
class SchmidtData:
    kappa_max: float
    coefficients: tuple
    local_bases: tuple  # (U_A, U_B), Schmidt vectors as columns

    def reassemble(self) -> np.ndarray:
        ua, ub = self.local_bases
        core = np.array([math.sqrt(self.coefficients[0]), 0, 0, math.sqrt(self.coefficients[1])])
        return np.kron(ua, ub) @ core


def schmidt(state) -> SchmidtData:
    """Schmidt decomposition of a pure state from its 2x2 amplitude matrix.

    With M = U S V^dagger the state is sum_k s_k |u_k>|conj(v_k)>.  U and
    s^2 come from the spectrum of M M^dagger; Bob's vectors are derived from
    them so the two bases carry consistent phases.
    """
    m = _require_pure(state).amplitudes.reshape(2, 2)
    ua = eig_hermitian(m @ m.conj().T).eigenvectors
    # s_k = |M^dagger u_k| is accurate to machine precision in absolute terms,
    # unlike sqrt of the eigenvalue, so tiny Schmidt weights stay tiny
    w = m.conj().T @ ua
    s = np.linalg.norm(w, axis=0)
    order = np.argsort(-s, kind="stable")
    ua, w, s = ua[:, order], w[:, order], s[order]
    vb = np.zeros((2, 2), dtype=complex)
    vb[:, 0] = (w[:, 0] / s[0]).conj()
    # second vector: exact orthogonal complement, phase taken from M^dagger u_1
    vb[:, 1] = np.array([-vb[1, 0].conj(), vb[0, 0].conj()])
    overlap = vb[:, 1].conj() @ w[:, 1].conj()
    if abs(overlap) > 0.0:
        vb[:, 1] *= overlap / abs(overlap)
    probs = s ** 2 / np.sum(s ** 2)
    return SchmidtData(float(probs[0]), (float(probs[0]), float(probs[1])), (ua, vb))


def concurrence_from_kappa(kappa_max: float) -> float:
    return 2.0 * math.sqrt(max(kappa_max * (1.0 - kappa_max), 0.0))


def kappa_from_concurrence(c: float) -> float:
    """Largest squared Schmidt coefficient of a pure state with concurrence c."""
    return 0.5 * (1.0 + math.sqrt(max(1.0 - c * c, 0.0)))


def concurrence_pure(state) -> float:
    return concurrence_from_kappa(schmidt(state).kappa_max)


def spin_flip_overlap(state) -> float:
    """|<phi| sigma_y x sigma_y |phi*>|, an independent route to the pure-state concurrence."""
    psi = _require_pure(state).amplitudes
    return float(abs(psi.conj() @ SIGMA_YY @ psi.conj()))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    dec = eig_hermitian(rho)
    vals = np.where(dec.eigenvalues < SQRT_CLIP, 0.0, dec.eigenvalues)
    v = dec.eigenvectors
    return (v * np.sqrt(vals)) @ v.conj().T


def wootters_lambdas(state) -> np.ndarray:
    """Square roots of the spectrum of rho (sy x sy) rho* (sy x sy), non-increasing."""
    rho = _as_state(state).density
    flipped = SIGMA_YY @ rho.conj() @ SIGMA_YY
    root = _psd_sqrt(rho)
    similar = root @ flipped @ root
    similar = 0.5 * (similar + similar.conj().T)
    vals = eig_hermitian(similar).eigenvalues
    return np.sqrt(np.clip(vals, 0.0, None))


def concurrence_mixed(state) -> float:
    lam = wootters_lambdas(state)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence(state) -> float:
    state = _as_state(state)
    return concurrence_pure(state) if state.is_pure else concurrence_mixed(state)


def filter_decomposition(state) -> np.ndarray:
    """R with (R x I)(|00> + |11>) equal to the state, so tr(R R^dagger) = 1.

    The unnormalised |00> + |11> fixes R completely: it is the amplitude
    matrix itself.
    """
    return _require_pure(state).amplitudes.reshape(2, 2).copy()


def marginal_z_expectation(state) -> float:
    """<phi| sigma_z x I |phi> evaluated as tr(R R^dagger sigma_z)."""
    r = filter_decomposition(state)
    return float(np.trace(r @ r.conj().T @ SIGMA_Z).real)


def local_unitary(state, u, v) -> TwoQubitState:
    return TwoQubitState.pure(np.kron(u, v) @ _require_pure(state).amplitudes)


def bell_state(kind: str = "phi+") -> TwoQubitState:
    s = 1 / math.sqrt(2)
    vectors = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    try:
        return TwoQubitState.pure(vectors[kind])
    except KeyError:
        raise DomainError(f"unknown Bell state {kind!r}") from None


def werner_state(weight: float) -> TwoQubitState:
    phi = bell_state("phi+").density
    return TwoQubitState.mixed(weight * phi + (1 - weight) * np.eye(4) / 4)


def random_pure_state(rng: np.random.Generator) -> TwoQubitState:
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoQubitState.pure(z / np.linalg.norm(z))
