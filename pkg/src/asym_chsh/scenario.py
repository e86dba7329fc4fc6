"""Measurement scenarios: angles, detection efficiency, projectors and POVMs.

By local-unitary freedom every two-setting qubit measurement pair can be
rotated into the x-z plane with the first direction along z, so a scenario
is fully described by two angles and Bob's efficiency.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import IDENTITY, HERMITIAN_TOL, as_unit_vector, bloch_observable, eig_hermitian

DEGENERACY_TOL = 1e-12


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(theta, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def check_efficiency(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0 or math.isnan(eta):
        raise DomainError(f"detection efficiency must lie in [0, 1], got {eta}")
    return eta


@dataclass(frozen=True)
class Scenario:
    theta_a: float = 0.0
    theta_b: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eta", check_efficiency(self.eta))
        object.__setattr__(self, "theta_a", wrap_angle(float(self.theta_a)))
        object.__setattr__(self, "theta_b", wrap_angle(float(self.theta_b)))

    def to_dict(self) -> dict:
        return {"theta_a": self.theta_a, "theta_b": self.theta_b, "eta": self.eta}

    @classmethod
    def from_dict(cls, record: dict) -> "Scenario":
        try:
            return cls(float(record["theta_a"]), float(record["theta_b"]), float(record["eta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed scenario record {record!r}: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"scenario is not valid JSON: {exc}") from None
        if not isinstance(record, dict):
            raise DomainError("scenario JSON must be an object")
        return cls.from_dict(record)


@dataclass(frozen=True)
class Povm:
    """Two-outcome (or more) measurement given by its effect operators."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        total = sum(effects)
        if np.max(np.abs(total - np.eye(total.shape[0]))) > HERMITIAN_TOL:
            raise DomainError("POVM effects do not sum to the identity")
        for k, e in enumerate(effects):
            if eig_hermitian(e).eigenvalues[-1] < -HERMITIAN_TOL:
                raise DomainError(f"POVM effect {k} is not positive semidefinite")
        object.__setattr__(self, "effects", effects)

    def __len__(self):
        return len(self.effects)

    def __getitem__(self, outcome):
        return self.effects[outcome]


def projector(direction, outcome: int) -> np.ndarray:
    """Projector onto spin +/- along ``direction``: (I + (-1)^outcome n.sigma)/2."""
    if outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome}")
    sign = 1.0 if outcome == 0 else -1.0
    return 0.5 * (IDENTITY + sign * bloch_observable(direction))


def inefficient_povm(direction, eta: float) -> Povm:
    """Spin measurement that clicks with probability ``eta``.

    No-click events are reported as outcome 0.
    """
    eta = check_efficiency(eta)
    as_unit_vector(direction)
    return Povm((
        eta * projector(direction, 0) + (1.0 - eta) * IDENTITY,
        eta * projector(direction, 1),
    ))


def projective_povm(direction) -> Povm:
    return Povm((projector(direction, 0), projector(direction, 1)))


def observable_from_povm(povm: Povm) -> np.ndarray:
    if len(povm) != 2:
        raise DomainError(f"observable needs a two-outcome POVM, got {len(povm)} outcomes")
    return povm[0] - povm[1]


def canonical_directions(s: Scenario):
    """Return (a0, a1, b0, b1) as unit 3-vectors in the x-z plane."""
    z = np.array([0.0, 0.0, 1.0])
    a1 = np.array([math.cos(s.theta_a), 0.0, math.sin(s.theta_a)])
    b1 = np.array([math.cos(s.theta_b), 0.0, math.sin(s.theta_b)])
    return z, a1, z.copy(), b1


def is_degenerate(s: Scenario) -> bool:
    """True when either party's second direction is (anti)parallel to z."""
    def near_pole(theta):
        return abs(abs(theta) - math.pi / 2) <= DEGENERACY_TOL
    return near_pole(s.theta_a) or near_pole(s.theta_b)
