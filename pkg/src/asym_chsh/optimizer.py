"""Search for the largest CHSH value reachable with a given amount of entanglement.

The Bell operators here are real in the computational basis, so the search
runs over real pure states (U_A x U_B)(sqrt(k)|00> + sqrt(1-k)|11>) with
U_A, U_B in O(2), together with the two measurement angles.  The search is
a deterministic coarse grid followed by Nelder-Mead refinement from the best
grid points.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .bell import LOCAL_BOUND, Kind, bell_operator, chsh_value, coefficient_table
from .bounds import violation_ub
from .entanglement import (
    TwoQubitState,
    concurrence_from_kappa,
    kappa_from_concurrence,
    spin_flip_overlap,
)
from .errors import DomainError
from .linalg import eig_hermitian, pauli_product
from .scenario import Scenario, check_efficiency, is_degenerate

VIOLATION_THRESHOLD = LOCAL_BOUND + 1e-9
CONCURRENCE_RESOLUTION = 1e-4
CONCURRENCE_FLOOR = 1e-3

_LABELS = ("xx", "xz", "zx", "zz", "xi", "zi")
_PAULI_STACK = np.array([pauli_product(label).real for label in _LABELS])
_REFLECTIONS = ((False, False), (False, True), (True, False), (True, True))


def _orthogonal(angle, reflect):
    c, s = np.cos(angle), np.sin(angle)
    m = np.array([[c, -s], [s, c]])
    if reflect:
        m = m @ np.diag([1.0, -1.0])
    return m


@dataclass(frozen=True)
class StateParams:
    kappa_max: float
    alice_rotation: float = 0.0
    bob_rotation: float = 0.0
    alice_reflect: bool = False
    bob_reflect: bool = False

    def amplitudes(self) -> np.ndarray:
        core = np.array([math.sqrt(self.kappa_max), 0.0, 0.0, math.sqrt(1.0 - self.kappa_max)])
        ua = _orthogonal(self.alice_rotation, self.alice_reflect)
        ub = _orthogonal(self.bob_rotation, self.bob_reflect)
        return np.kron(ua, ub) @ core

    def to_state(self) -> TwoQubitState:
        return TwoQubitState.pure(self.amplitudes())

    @property
    def concurrence(self) -> float:
        return concurrence_from_kappa(self.kappa_max)


@dataclass
class OptimizationResult:
    best_value: float
    best_state: StateParams
    best_scenario: Scenario
    iterations: int
    converged: bool
    kind: Kind = Kind.ASYMMETRIC

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_state": asdict(self.best_state),
            "best_scenario": self.best_scenario.to_dict(),
            "iterations": self.iterations,
            "converged": self.converged,
            "kind": self.kind.value,
            "concurrence": self.best_state.concurrence,
        }


@dataclass(frozen=True)
class SearchConfig:
    angle_points: int = 64
    rotation_points: int = 32
    n_starts: int = 5
    max_iter: int = 500
    simplex_tol: float = 1e-10


DEFAULT_CONFIG = SearchConfig()


def _features(amplitudes: np.ndarray) -> np.ndarray:
    """Pauli expectations <xx>, <xz>, <zx>, <zz>, <x1>, <z1> of real states (..., 4)."""
    return np.einsum("...i,kij,...j->...k", amplitudes, _PAULI_STACK, amplitudes)


def _coefficients(theta_a, theta_b, eta, kind: Kind) -> np.ndarray:
    """Coefficient vectors (..., 6) for arrays of angles; mirrors bell.coefficient_table."""
    sa, ca = np.sin(theta_a), np.cos(theta_a)
    sb, cb = np.sin(theta_b), np.cos(theta_b)
    if kind is Kind.CHSH:
        eta = 1.0
    zero = np.zeros(np.broadcast(sa, sb).shape)
    if kind is Kind.SINGLE_SETTING:
        cols = (-eta * ca * cb, ca * (1 - eta * sb), eta * cb * (1 - sa),
                1 + eta * sb + sa * (1 - eta * sb), -(1 - eta) * ca + zero, (1 - eta) * (1 - sa) + zero)
    else:
        cols = (-eta * ca * cb, eta * ca * (1 - sb), eta * cb * (1 - sa),
                eta * (1 + sa + sb - sa * sb), zero, 2 * (1 - eta) + zero)
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def _state_grid(kappa: float, n: int):
    """All rotation/reflection combinations on an n-point grid of [0, pi)."""
    rot = np.arange(n) * (math.pi / n)
    c, s = np.cos(rot), np.sin(rot)
    sk, sk1 = math.sqrt(kappa), math.sqrt(1.0 - kappa)
    params, amps = [], []
    for ra, rb in _REFLECTIONS:
        # first and second columns of each orthogonal matrix, shape (n, 2)
        a0, a1 = np.stack([c, s], 1), np.stack([-s, c], 1) * (-1 if ra else 1)
        b0, b1 = np.stack([c, s], 1), np.stack([-s, c], 1) * (-1 if rb else 1)
        psi = (sk * np.einsum("ai,bj->abij", a0, b0) + sk1 * np.einsum("ai,bj->abij", a1, b1))
        amps.append(psi.reshape(n * n, 4))
        params.extend((rot[ia], rot[ib], ra, rb) for ia in range(n) for ib in range(n))
    return params, np.concatenate(amps)


def _top_indices(values: np.ndarray, k: int):
    """Best k rows (angle points) with the best column (state) in each.

    Ties are resolved towards the lowest index.
    """
    cols = np.argmax(values, axis=1)
    row_best = values[np.arange(values.shape[0]), cols]
    k = min(k, row_best.size)
    rows = np.lexsort((np.arange(row_best.size), -row_best))[:k]
    return [(int(r), int(cols[r])) for r in rows]


def _value_scalar(ta, tb, a, b, reflect, kappa, eta, kind: Kind) -> float:
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    fa = -1.0 if reflect[0] else 1.0
    fb = -1.0 if reflect[1] else 1.0
    sk, sk1 = math.sqrt(kappa), math.sqrt(1.0 - kappa)
    # psi = sqrt(k) u0 x v0 + sqrt(1-k) u1 x v1 with u0 = (ca, sa), u1 = fa (-sa, ca)
    w = sk1 * fa * fb
    p00 = sk * ca * cb + w * sa * sb
    p01 = sk * ca * sb - w * sa * cb
    p10 = sk * sa * cb - w * ca * sb
    p11 = sk * sa * sb + w * ca * cb
    xx = 2 * (p00 * p11 + p01 * p10)
    xz = 2 * (p00 * p10 - p01 * p11)
    zx = 2 * (p00 * p01 - p10 * p11)
    zz = p00 * p00 - p01 * p01 - p10 * p10 + p11 * p11
    xi = 2 * (p00 * p10 + p01 * p11)
    zi = p00 * p00 + p01 * p01 - p10 * p10 - p11 * p11
    sA, cA = math.sin(ta), math.cos(ta)
    sB, cB = math.sin(tb), math.cos(tb)
    if kind is Kind.CHSH:
        eta = 1.0
    if kind is Kind.SINGLE_SETTING:
        return (-eta * cA * cB * xx + cA * (1 - eta * sB) * xz + eta * cB * (1 - sA) * zx
                + (1 + eta * sB + sA * (1 - eta * sB)) * zz
                - (1 - eta) * cA * xi + (1 - eta) * (1 - sA) * zi)
    return (eta * (-cA * cB * xx + cA * (1 - sB) * xz + cB * (1 - sA) * zx
                   + (1 + sA + sB - sA * sB) * zz) + 2 * (1 - eta) * zi)


def _refine(x0, step, kappa, eta, kind, reflect, cfg: SearchConfig, fixed_angles=None):
    def unpack(x):
        if fixed_angles is None:
            return x[0], x[1], x[2], x[3]
        return fixed_angles[0], fixed_angles[1], x[0], x[1]

    def negative_value(x):
        ta, tb, a, b = unpack(x)
        return -_value_scalar(ta, tb, a, b, reflect, kappa, eta, kind)

    x0 = np.asarray(x0, dtype=float)
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])
    res = minimize(
        negative_value, x0, method="Nelder-Mead",
        options={"initial_simplex": simplex, "maxiter": cfg.max_iter,
                 "xatol": cfg.simplex_tol, "fatol": cfg.simplex_tol},
    )
    return unpack(res.x), -res.fun, res.nit, bool(res.success)


def max_value_fixed_concurrence(eta: float, concurrence: float, kind=Kind.ASYMMETRIC,
                                config: SearchConfig = DEFAULT_CONFIG) -> OptimizationResult:
    """Largest tr[rho B] found over pure states of the given concurrence and all angles.

    The returned value is achieved by the returned state and scenario, so it
    is a lower bound on the true maximum.
    """
    eta = check_efficiency(eta)
    if not 0.0 <= concurrence <= 1.0:
        raise DomainError(f"concurrence must lie in [0, 1], got {concurrence}")
    kind = Kind.parse(kind)
    kappa = kappa_from_concurrence(concurrence)

    theta = -math.pi + np.arange(config.angle_points) * (2 * math.pi / config.angle_points)
    ta, tb = np.meshgrid(theta, theta, indexing="ij")
    coef = _coefficients(ta.reshape(-1), tb.reshape(-1), eta, kind)  # (G, 6)
    params, amps = _state_grid(kappa, config.rotation_points)
    values = coef @ _features(amps).T  # (angles, states)
    top = _top_indices(values, config.n_starts)

    step = 2 * math.pi / config.angle_points
    best = None
    total_iter = 0
    all_converged = True
    for ig, js in top:
        a, b, ra, rb = params[js]
        x0 = (ta.reshape(-1)[ig], tb.reshape(-1)[ig], a, b)
        (t_a, t_b, a, b), val, nit, ok = _refine(x0, step, kappa, eta, kind, (ra, rb), config)
        total_iter += nit
        all_converged &= ok
        if best is None or val > best[0]:
            best = (val, StateParams(kappa, a, b, ra, rb), Scenario(t_a, t_b, eta))

    _, state, scenario = best
    value = chsh_value(state.to_state(), bell_operator(scenario, kind))
    return OptimizationResult(value, state, scenario, total_iter, all_converged, kind)


def max_value_fixed_scenario(scenario: Scenario, concurrence: float, kind=Kind.ASYMMETRIC,
                             config: SearchConfig = DEFAULT_CONFIG) -> OptimizationResult:
    """Same search with the measurement angles held fixed."""
    kind = Kind.parse(kind)
    kappa = kappa_from_concurrence(concurrence)
    coef = _coefficients(scenario.theta_a, scenario.theta_b, scenario.eta, kind)
    params, amps = _state_grid(kappa, config.rotation_points)
    values = _features(amps) @ coef
    top = np.lexsort((np.arange(values.size), -values))[: config.n_starts]
    step = math.pi / config.rotation_points
    best = None
    total_iter = 0
    all_converged = True
    for js in top:
        a, b, ra, rb = params[js]
        (_, _, a, b), val, nit, ok = _refine(
            (a, b), step, kappa, scenario.eta, kind, (ra, rb), config,
            fixed_angles=(scenario.theta_a, scenario.theta_b))
        total_iter += nit
        all_converged &= ok
        if best is None or val > best[0]:
            best = (val, StateParams(kappa, a, b, ra, rb))
    state = best[1]
    value = chsh_value(state.to_state(), bell_operator(scenario, kind))
    return OptimizationResult(value, state, scenario, total_iter, all_converged, kind)


def _violates(result: OptimizationResult) -> bool:
    return result.best_value > VIOLATION_THRESHOLD


def min_concurrence_violating(eta: float, kind=Kind.ASYMMETRIC, config: SearchConfig = DEFAULT_CONFIG):
    """Smallest concurrence (down to a floor of 1e-3) whose best state exceeds 2.

    Returns ``(concurrence, witness)``.
    """
    kind = Kind.parse(kind)
    eta = check_efficiency(eta)
    if eta <= 0.5 and kind is Kind.ASYMMETRIC:
        raise DomainError("no violation exists for eta <= 1/2: every statistic has a local model")
    witness = max_value_fixed_concurrence(eta, CONCURRENCE_FLOOR, kind, config)
    if _violates(witness):
        return CONCURRENCE_FLOOR, witness
    hi = max_value_fixed_concurrence(eta, 1.0, kind, config)
    lo_c, hi_c = CONCURRENCE_FLOOR, 1.0
    if not _violates(hi):
        # look for any violating concurrence on a coarse sweep
        for c in np.linspace(0.1, 0.9, 9):
            r = max_value_fixed_concurrence(eta, float(c), kind, config)
            if _violates(r):
                hi_c, hi = float(c), r
                break
        else:
            raise DomainError(f"no violating state found at eta={eta}")
    while hi_c - lo_c > CONCURRENCE_RESOLUTION:
        mid = 0.5 * (lo_c + hi_c)
        r = max_value_fixed_concurrence(eta, mid, kind, config)
        if _violates(r):
            hi_c, hi = mid, r
        else:
            lo_c = mid
    return hi_c, hi


def max_concurrence_violating(eta: float, kind=Kind.ASYMMETRIC, config: SearchConfig = DEFAULT_CONFIG):
    """Largest concurrence whose best state still exceeds 2, to resolution 1e-4.

    Returns ``(concurrence, witness)``; this traces the achievable curve that
    sits below the analytic bound.
    """
    kind = Kind.parse(kind)
    eta = check_efficiency(eta)
    if eta <= 0.5 and kind is Kind.ASYMMETRIC:
        raise DomainError("no violation exists for eta <= 1/2: every statistic has a local model")
    top = max_value_fixed_concurrence(eta, 1.0, kind, config)
    if _violates(top):
        return 1.0, top
    low = max_value_fixed_concurrence(eta, CONCURRENCE_FLOOR, kind, config)
    if not _violates(low):
        raise DomainError(f"no violating state found at eta={eta}")
    lo_c, hi_c = CONCURRENCE_FLOOR, 1.0
    while hi_c - lo_c > CONCURRENCE_RESOLUTION:
        mid = 0.5 * (lo_c + hi_c)
        r = max_value_fixed_concurrence(eta, mid, kind, config)
        if _violates(r):
            lo_c, low = mid, r
        else:
            hi_c = mid
    return lo_c, low


def prop1_angle_grid(n: int) -> np.ndarray:
    """n angles strictly inside (-pi/2, pi/2)."""
    return np.linspace(-math.pi / 2, math.pi / 2, n + 2)[1:-1]


@dataclass
class MarginScan:
    eta: float
    theta: np.ndarray
    margins: np.ndarray  # margins[i, j] = lambda_max - 2 at (theta[i], theta[j])

    @property
    def min_margin(self) -> float:
        return float(self.margins.min())

    @property
    def argmin(self):
        i, j = np.unravel_index(int(np.argmin(self.margins)), self.margins.shape)
        return float(self.theta[i]), float(self.theta[j])


def prop1_margin_scan(eta: float, grid: int = 50) -> MarginScan:
    """lambda_max(B') - 2 over a non-degenerate angle grid, via the eigensolver."""
    eta = check_efficiency(eta)
    theta = prop1_angle_grid(grid)
    for t in theta:
        if is_degenerate(Scenario(t, 0.0, eta)):
            raise DomainError("angle grid touches a degenerate direction")
    ta, tb = np.meshgrid(theta, theta, indexing="ij")
    coef = _coefficients(ta, tb, eta, Kind.SINGLE_SETTING)
    mats = np.einsum("...k,kij->...ij", coef, _PAULI_STACK).astype(complex)
    lam = eig_hermitian(mats).eigenvalues[..., 0]
    return MarginScan(eta, theta, lam - LOCAL_BOUND)


@dataclass
class EigenspaceSearch:
    concurrence: float
    weight: float  # mixing angle t in cos(t) v1 + e^{i phase} sin(t) v2
    phase: float
    value: float   # tr[rho B'] of the maximiser
    eigenvalues: tuple = field(default_factory=tuple)


def degenerate_eigenspace_concurrence(theta_a: float, theta_b: float, eta: float,
                                      n_weight: int = 181, n_phase: int = 72) -> EigenspaceSearch:
    """Most entangled superposition of the top two eigenvectors of B'.

    For eta > 0 only superpositions with tr[rho B'] > 2 are admitted; at
    eta = 0 the whole top eigenspace is searched.
    """
    eta = check_efficiency(eta)
    op = bell_operator(Scenario(theta_a, theta_b, eta), Kind.SINGLE_SETTING)
    dec = op.spectrum()
    l1, l2 = float(dec.eigenvalues[0]), float(dec.eigenvalues[1])
    v1, v2 = dec.eigenvectors[:, 0], dec.eigenvectors[:, 1]

    t_max = math.pi / 2
    if eta > 0 and l2 <= LOCAL_BOUND:
        if l1 <= LOCAL_BOUND:
            raise DomainError("largest eigenvalue does not exceed 2; no violating superposition")
        # cos^2 t (l1 - 2) + sin^2 t (l2 - 2) > 0
        t_max = math.atan(math.sqrt((l1 - LOCAL_BOUND) / (LOCAL_BOUND - l2))) * (1 - 1e-9)

    def state(t, phi):
        return math.cos(t) * v1 + np.exp(1j * phi) * math.sin(t) * v2

    def conc(t, phi):
        return spin_flip_overlap(TwoQubitState.pure(state(t, phi)))

    ts = np.linspace(0.0, t_max, n_weight)
    phis = np.linspace(0.0, 2 * math.pi, n_phase, endpoint=False)
    grid = np.array([[conc(t, p) for p in phis] for t in ts])
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)

    def negative(x):
        t = min(max(x[0], 0.0), t_max)
        return -conc(t, x[1])

    res = minimize(negative, [ts[i], phis[j]], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
    t = min(max(res.x[0], 0.0), t_max)
    phi = float(res.x[1])
    best_c = max(-res.fun, grid[i, j])
    if best_c > -res.fun:
        t, phi = ts[i], phis[j]
    psi = state(t, phi)
    value = float((psi.conj() @ op.matrix @ psi).real)
    return EigenspaceSearch(float(best_c), float(t), phi, value, (l1, l2))
