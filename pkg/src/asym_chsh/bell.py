"""CHSH Bell operators with perfect, one-sided, and single-setting inefficiency.

Three operators are built from the local observables O = E_0 - E_1:

* ``CHSH``          all four measurements projective;
* ``ASYMMETRIC``    both of Bob's measurements click with probability eta;
* ``SINGLE_SETTING`` only Bob's second measurement (y = 1) is inefficient.

All three are real combinations of {I, sigma_x, sigma_z} on each side, so
they are summarised by a :class:`CoefficientTable`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .entanglement import TwoQubitState, _as_state
from .errors import DomainError
from .linalg import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    eig_hermitian,
    hermiticity_error,
    pauli_product,
    tensor,
)
from .scenario import (
    Scenario,
    canonical_directions,
    check_efficiency,
    inefficient_povm,
    observable_from_povm,
    projective_povm,
)

LOCAL_BOUND = 2.0


class Kind(str, enum.Enum):
    CHSH = "chsh"
    ASYMMETRIC = "asym"
    SINGLE_SETTING = "single"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        aliases = {"asymmetric": "asym", "single_setting": "single", "single-setting": "single"}
        key = str(value).lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise DomainError(f"unknown Bell operator kind {value!r}") from None


@dataclass(frozen=True)
class CoefficientTable:
    """Pauli-basis coefficients; ``c_xz`` multiplies sigma_x (Alice) x sigma_z (Bob)."""

    c_xx: float = 0.0
    c_xz: float = 0.0
    c_zx: float = 0.0
    c_zz: float = 0.0
    r_x: float = 0.0
    r_z: float = 0.0

    def to_matrix(self) -> np.ndarray:
        return (
            self.c_xx * pauli_product("xx")
            + self.c_xz * pauli_product("xz")
            + self.c_zx * pauli_product("zx")
            + self.c_zz * pauli_product("zz")
            + self.r_x * pauli_product("xi")
            + self.r_z * pauli_product("zi")
        )

    @classmethod
    def from_matrix(cls, m) -> "CoefficientTable":
        m = np.asarray(m)
        coef = {label: float(np.trace(pauli_product(label) @ m).real) / 4.0
                for label in ("xx", "xz", "zx", "zz", "xi", "zi")}
        return cls(coef["xx"], coef["xz"], coef["zx"], coef["zz"], coef["xi"], coef["zi"])

    def as_dict(self) -> dict:
        return dict(c_xx=self.c_xx, c_xz=self.c_xz, c_zx=self.c_zx,
                    c_zz=self.c_zz, r_x=self.r_x, r_z=self.r_z)


@dataclass(frozen=True, eq=False)
class BellOperator:
    matrix: np.ndarray
    kind: Kind
    scenario: Scenario

    def __post_init__(self):
        if hermiticity_error(self.matrix) > 1e-10:
            raise DomainError("Bell operator is not Hermitian")

    def coefficients(self) -> CoefficientTable:
        return CoefficientTable.from_matrix(self.matrix)

    def spectrum(self):
        return eig_hermitian(self.matrix)

    @property
    def lambda_max(self) -> float:
        return float(self.spectrum().eigenvalues[0])


def bell_from_observables(oa0, oa1, ob0, ob1) -> np.ndarray:
    """O^A_0 (O^B_0 + O^B_1) + O^A_1 (O^B_0 - O^B_1)."""
    return tensor(oa0, ob0 + ob1) + tensor(oa1, ob0 - ob1)


def _alice_observables(s: Scenario):
    a0, a1, _, _ = canonical_directions(s)
    return observable_from_povm(projective_povm(a0)), observable_from_povm(projective_povm(a1))


def bob_povms(s: Scenario, kind) -> tuple:
    kind = Kind.parse(kind)
    _, _, b0, b1 = canonical_directions(s)
    if kind is Kind.CHSH:
        return projective_povm(b0), projective_povm(b1)
    if kind is Kind.ASYMMETRIC:
        return inefficient_povm(b0, s.eta), inefficient_povm(b1, s.eta)
    return projective_povm(b0), inefficient_povm(b1, s.eta)


def alice_povms(s: Scenario) -> tuple:
    a0, a1, _, _ = canonical_directions(s)
    return projective_povm(a0), projective_povm(a1)


def bell_operator(s: Scenario, kind) -> BellOperator:
    kind = Kind.parse(kind)
    oa0, oa1 = _alice_observables(s)
    ob0, ob1 = (observable_from_povm(p) for p in bob_povms(s, kind))
    return BellOperator(bell_from_observables(oa0, oa1, ob0, ob1), kind, s)


def bell_chsh(s: Scenario) -> BellOperator:
    """Standard CHSH operator; the scenario's efficiency is ignored."""
    return bell_operator(s, Kind.CHSH)


def bell_asymmetric(s: Scenario) -> BellOperator:
    return bell_operator(s, Kind.ASYMMETRIC)


def bell_single_setting(s: Scenario) -> BellOperator:
    return bell_operator(s, Kind.SINGLE_SETTING)


def asymmetric_coefficients(s: Scenario) -> CoefficientTable:
    eta = check_efficiency(s.eta)
    sa, ca = math.sin(s.theta_a), math.cos(s.theta_a)
    sb, cb = math.sin(s.theta_b), math.cos(s.theta_b)
    return CoefficientTable(
        c_xx=-eta * ca * cb,
        c_xz=eta * ca * (1 - sb),
        c_zx=eta * cb * (1 - sa),
        c_zz=eta * (1 + sa + sb - sa * sb),
        r_x=0.0,
        r_z=2 * (1 - eta),
    )


def single_setting_coefficients(s: Scenario) -> CoefficientTable:
    eta = check_efficiency(s.eta)
    sa, ca = math.sin(s.theta_a), math.cos(s.theta_a)
    sb, cb = math.sin(s.theta_b), math.cos(s.theta_b)
    return CoefficientTable(
        c_xx=-eta * ca * cb,
        c_xz=ca * (1 - eta * sb),
        c_zx=eta * cb * (1 - sa),
        c_zz=1 + eta * sb + sa * (1 - eta * sb),
        r_x=-(1 - eta) * ca,
        r_z=(1 - eta) * (1 - sa),
    )


def coefficient_table(s: Scenario, kind) -> CoefficientTable:
    kind = Kind.parse(kind)
    if kind is Kind.CHSH:
        return asymmetric_coefficients(Scenario(s.theta_a, s.theta_b, 1.0))
    if kind is Kind.ASYMMETRIC:
        return asymmetric_coefficients(s)
    return single_setting_coefficients(s)


def asymmetric_as_mixture(s: Scenario) -> np.ndarray:
    """eta * B_CHSH + 2 (1 - eta) sigma_z x I."""
    return s.eta * bell_chsh(s).matrix + 2 * (1 - s.eta) * tensor(SIGMA_Z, IDENTITY)


def correlator(state, oa, ob) -> float:
    """tr[rho (oa x ob)]."""
    state = _as_state(state)
    oa = np.asarray(oa, dtype=complex)
    ob = np.asarray(ob, dtype=complex)
    if hermiticity_error(oa) > 1e-10 or hermiticity_error(ob) > 1e-10:
        raise DomainError("correlator observables must be Hermitian")
    return state.expectation(tensor(oa, ob))


def outcome_probabilities(state, povm_a, povm_b) -> np.ndarray:
    """p[a, b] = tr[rho (E^A_a x E^B_b)]."""
    rho = _as_state(state).density
    p = np.empty((len(povm_a), len(povm_b)))
    for a, ea in enumerate(povm_a.effects):
        for b, eb in enumerate(povm_b.effects):
            p[a, b] = np.trace(rho @ tensor(ea, eb)).real
    return p


def correlator_from_probabilities(p) -> float:
    """sum_{a,b} (-1)^(a+b) p(a, b), the mean of the product of +-1 outcomes."""
    p = np.asarray(p, dtype=float)
    return float(p[0, 0] - p[0, 1] - p[1, 0] + p[1, 1])


def chsh_from_probabilities(state, s: Scenario, kind) -> float:
    """E(0,0) + E(0,1) + E(1,0) - E(1,1) from outcome statistics."""
    pa = alice_povms(s)
    pb = bob_povms(s, kind)
    e = {(x, y): correlator_from_probabilities(outcome_probabilities(state, pa[x], pb[y]))
         for x in (0, 1) for y in (0, 1)}
    return e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1]


def chsh_value(state, op: BellOperator) -> float:
    """Signed tr[rho B]; the inequality is violated when its magnitude exceeds 2."""
    return _as_state(state).expectation(op.matrix)


def symmetric_construction(kappa: float) -> Scenario:
    """Angles and efficiency eta = 1/2 + kappa whose asymmetric operator has
    largest eigenvalue 2 sqrt(1 + 4 kappa^2)."""
    kappa = float(kappa)
    if not 0.0 <= kappa <= 0.5:
        raise DomainError(f"kappa must lie in [0, 1/2], got {kappa}")
    theta_b = math.asin((1 - 2 * kappa) ** 2 / (1 + 2 * kappa) ** 2)
    return Scenario(0.0, theta_b, 0.5 + kappa)


def lambda_max_symmetric(kappa: float) -> float:
    symmetric_construction(kappa)
    return 2.0 * math.sqrt(1.0 + 4.0 * kappa * kappa)


def lambda_max_sq_general(t: CoefficientTable) -> float:
    """Closed-form squared top eigenvalue of an x-z Bell operator with local term on Alice."""
    inner = ((t.r_x * t.c_xx + t.r_z * t.c_zx) ** 2
             + (t.r_x * t.c_xz + t.r_z * t.c_zz) ** 2
             + (t.c_xx * t.c_zz - t.c_xz * t.c_zx) ** 2)
    return (t.r_x ** 2 + t.r_z ** 2 + t.c_xx ** 2 + t.c_xz ** 2 + t.c_zx ** 2 + t.c_zz ** 2
            + 2.0 * math.sqrt(inner))


def lambda_max_sq_single_setting_trig(s: Scenario) -> float:
    eta = check_efficiency(s.eta)
    sa = math.sin(s.theta_a)
    cb = math.cos(s.theta_b)
    radicand = eta ** 2 * (1 - sa) * (cb ** 2 * (1 + sa) + (1 - eta) ** 2 * (1 - sa))
    return 4.0 * (1.0 - eta * (1 - eta) * (1 - sa)) + 4.0 * math.sqrt(max(radicand, 0.0))


def lambda_max_sq_single_setting(s: Scenario) -> float:
    return lambda_max_sq_general(single_setting_coefficients(s))


def sign_flip_conjugate(op: BellOperator) -> BellOperator:
    """(sigma_y x I) B (sigma_y x I); equals -B for the asymmetric operator."""
    u = tensor(SIGMA_Y, IDENTITY)
    return BellOperator(u @ op.matrix @ u, op.kind, op.scenario)


def top_eigenstate(op: BellOperator) -> TwoQubitState:
    return TwoQubitState.pure(op.spectrum().top_eigenvector)
