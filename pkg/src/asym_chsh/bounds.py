"""Analytic upper bounds on the entanglement of CHSH-violating states.

The bound on C^2 follows from requiring

    1 + kappa < eta sqrt(1 + C^2) + (1 - eta) sqrt(1 - C^2)

and squaring twice, which is only valid for 1/2 <= eta <= (1 + kappa)/sqrt(2).
Outside that window the functions refuse to evaluate unless ``relaxed=True``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import DomainError

SQRT2 = math.sqrt(2.0)


class WindowError(DomainError):
    """Efficiency/margin pair outside the range where the bound was derived."""


class QuarticCoefficients(NamedTuple):
    """alpha C^4 + beta C^2 + gamma < 0 for every violating state."""

    alpha: float
    beta: float
    gamma: float

    def roots(self):
        """Roots in x = C^2, smaller first.  None if the discriminant is negative."""
        disc = self.beta ** 2 - 4 * self.alpha * self.gamma
        if disc < 0:
            return None
        root = math.sqrt(disc)
        return (-self.beta - root) / (2 * self.alpha), (-self.beta + root) / (2 * self.alpha)

    def larger_root(self) -> float:
        roots = self.roots()
        if roots is None:
            raise DomainError("quadratic in C^2 has no real roots")
        return roots[1]


def _check_inputs(eta: float, kappa: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if kappa < 0.0:
        raise DomainError(f"violation margin kappa must be >= 0, got {kappa}")


def _margin(kappa: float) -> float:
    return kappa * (2.0 + kappa)


def quartic_coefficients(eta: float, kappa: float) -> QuarticCoefficients:
    _check_inputs(eta, kappa)
    m = _margin(kappa)
    w = eta * (1.0 - eta)
    alpha = (1.0 - 2.0 * eta + 2.0 * eta * eta) ** 2
    beta = -2.0 * (2.0 * eta - 1.0) * (m + 2.0 * w)
    gamma = m * (m + 4.0 * w)
    return QuarticCoefficients(alpha, beta, gamma)


def window_upper(kappa: float) -> float:
    return (1.0 + kappa) / SQRT2


def in_derivation_window(eta: float, kappa: float = 0.0) -> bool:
    return 0.5 <= eta <= window_upper(kappa)


def main_bound(eta: float, kappa: float = 0.0, relaxed: bool = False) -> float:
    """Upper bound on C(rho)^2 for states with tr[rho B] > 2 (1 + kappa)."""
    eta = float(eta)
    kappa = float(kappa)
    _check_inputs(eta, kappa)
    if not relaxed and not in_derivation_window(eta, kappa):
        raise WindowError(
            f"eta={eta} outside the derivation window [1/2, (1+kappa)/sqrt(2)] = "
            f"[0.5, {window_upper(kappa):.12g}]; pass relaxed=True to evaluate anyway"
        )
    m = _margin(kappa)
    w = eta * (1.0 - eta)
    radicand = 1.0 - m - 4.0 * w
    if radicand < 0.0:
        raise WindowError(
            f"square-root argument 1 - kappa(2+kappa) - 4 eta(1-eta) = {radicand:.6g} < 0: "
            f"no state exceeds 2(1+{kappa}) at eta={eta}"
        )
    denom = (1.0 - 2.0 * eta + 2.0 * eta * eta) ** 2
    return ((2.0 * eta - 1.0) * (m + 2.0 * w) + 2.0 * w * (1.0 + kappa) * math.sqrt(radicand)) / denom


def violation_ub(eta: float, relaxed: bool = False) -> float:
    """Bound on C^2 for any CHSH violation (kappa = 0)."""
    eta = float(eta)
    if relaxed:
        if not 0.5 <= eta <= 1.0:
            raise WindowError(f"eta must lie in [1/2, 1] even in relaxed mode, got {eta}")
    elif not in_derivation_window(eta, 0.0):
        raise WindowError(
            f"eta={eta} outside [1/2, 1/sqrt(2)]; pass relaxed=True to evaluate anyway"
        )
    return 4.0 * eta * (1.0 - eta) * (2.0 * eta - 1.0) / (1.0 - 2.0 * eta + 2.0 * eta * eta) ** 2


def violation_ub_limit_check(epsilons) -> list:
    """Evaluate the kappa = 0 bound at eta = 1/2 + eps for each eps."""
    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps):
        raise DomainError("epsilons must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError("epsilons must be strictly decreasing")
    return [(0.5 + e, violation_ub(0.5 + e, relaxed=True)) for e in eps]


def kappa_max_bound_single(eta: float, theta_a: float, theta_b: float) -> float:
    """Upper bound on the largest squared Schmidt coefficient of any state
    violating CHSH with only Bob's second setting inefficient.

    Returned unclamped: the raw expression can fall below 1/2.
    """
    eta = float(eta)
    if not 0.0 <= eta < 1.0:
        raise DomainError(f"eta must lie in [0, 1), got {eta}")
    sa = math.sin(theta_a)
    if 1.0 - sa <= 0.0:
        raise DomainError("theta_a = pi/2 makes the bound's denominator vanish")
    inner = 1.0 + eta ** 2 + 2.0 * eta * math.cos(theta_a) * math.cos(theta_b) + (1.0 - eta ** 2) * sa
    num = SQRT2 - math.sqrt(max(inner, 0.0))
    return num / (2.0 * (1.0 - eta) * math.sqrt(1.0 - sa)) + 0.5
