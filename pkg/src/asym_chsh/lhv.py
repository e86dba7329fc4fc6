"""Local hidden-variable simulation of no-signaling statistics with lossy detection.

Bob is allowed an extra "no click" outcome, stored as the last index of his
output axis.  When Bob's efficiency is at most 1/|Y|, the model built by
:func:`massar_pironio_model` reproduces any no-signaling table exactly: Bob
announces the hidden (output, input) pair when his input matches it and no
click otherwise, while Alice samples conditionally on that pair.

Tables are indexed ``p[x, y, a, b]``.  Passing ``exact=True`` stores entries
as :class:`fractions.Fraction` so that identities can be checked with zero
deviation.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bell import alice_povms, bob_povms, Kind
from .entanglement import _as_state
from .errors import DomainError
from .linalg import tensor
from .scenario import Scenario, projective_povm, canonical_directions

TOL = 1e-10


class NormalizationError(DomainError):
    pass


class SignalingError(DomainError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class NoModelError(DomainError):
    """The construction has no model at the requested efficiency."""


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(str(v))


def _as_table(table, exact: bool) -> np.ndarray:
    if exact:
        arr = np.asarray(table, dtype=object)
        return np.vectorize(_to_fraction, otypes=[object])(arr)
    return np.asarray(table, dtype=float)


def _close(a, b, exact: bool) -> bool:
    return a == b if exact else abs(a - b) <= TOL


@dataclass(frozen=True, eq=False)
class NoSignalingDistribution:
    table: np.ndarray  # p[x, y, a, b]
    exact: bool = False

    @property
    def alphabets(self):
        """(|A|, |B|, |X|, |Y|)."""
        nx, ny, na, nb = self.table.shape
        return na, nb, nx, ny

    def bob_marginal(self) -> np.ndarray:
        """p(b|y), taken at x = 0."""
        return self.table[0].sum(axis=1)

    def alice_marginal(self) -> np.ndarray:
        """p(a|x), taken at y = 0."""
        return self.table[:, 0].sum(axis=2)

    def to_json(self) -> str:
        na, nb, nx, ny = self.alphabets
        flat = self.table.reshape(-1).tolist()
        p = [str(v) for v in flat] if self.exact else [float(v) for v in flat]
        return json.dumps({"A": na, "B": nb, "X": nx, "Y": ny, "p": p})

    @classmethod
    def from_json(cls, text: str, exact: bool = False) -> "NoSignalingDistribution":
        try:
            record = json.loads(text)
            shape = (int(record["X"]), int(record["Y"]), int(record["A"]), int(record["B"]))
            flat = record["p"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed distribution JSON: {exc}") from None
        if len(flat) != int(np.prod(shape)):
            raise DomainError(f"expected {int(np.prod(shape))} probabilities, got {len(flat)}")
        try:
            table = _as_table(flat, exact).reshape(shape)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"unreadable probability entry: {exc}") from None
        return validate_no_signaling(table, exact=exact)


def validate_no_signaling(table, alphabets=None, exact: bool = False) -> NoSignalingDistribution:
    """Check normalization, non-negativity and both no-signaling conditions.

    ``alphabets`` is an optional (|A|, |B|, |X|, |Y|) tuple checked against the
    table shape.
    """
    p = _as_table(table, exact)
    if p.ndim != 4:
        raise DomainError(f"table must have shape (X, Y, A, B), got {p.shape}")
    nx, ny, na, nb = p.shape
    if alphabets is not None and tuple(alphabets) != (na, nb, nx, ny):
        raise DomainError(f"table shape {p.shape} does not match alphabets {tuple(alphabets)}")
    for idx in itertools.product(range(nx), range(ny), range(na), range(nb)):
        if p[idx] < (0 if exact else -TOL):
            raise NormalizationError(f"negative probability p{idx} = {p[idx]}")
    for x, y in itertools.product(range(nx), range(ny)):
        total = p[x, y].sum()
        if not _close(total, 1, exact):
            raise NormalizationError(f"p(.,.|x={x},y={y}) sums to {total}, expected 1")
    bob = p.sum(axis=2)  # [x, y, b]
    for x, y, b in itertools.product(range(1, nx), range(ny), range(nb)):
        if not _close(bob[x, y, b], bob[0, y, b], exact):
            raise SignalingError(
                f"Bob's marginal depends on Alice's input: p(b={b}|x=0,y={y}) = {bob[0, y, b]} "
                f"but p(b={b}|x={x},y={y}) = {bob[x, y, b]}",
                witness={"b": b, "x": 0, "x_prime": x, "y": y},
            )
    alice = p.sum(axis=3)  # [x, y, a]
    for x, y, a in itertools.product(range(nx), range(1, ny), range(na)):
        if not _close(alice[x, y, a], alice[x, 0, a], exact):
            raise SignalingError(
                f"Alice's marginal depends on Bob's input: p(a={a}|x={x},y=0) = {alice[x, 0, a]} "
                f"but p(a={a}|x={x},y={y}) = {alice[x, y, a]}",
                witness={"a": a, "x": x, "y": 0, "y_prime": y},
            )
    return NoSignalingDistribution(p, exact)


def quantum_distribution(state, s: Scenario, kind=None) -> NoSignalingDistribution:
    """Born-rule table for the scenario's directions.

    With ``kind=None`` both parties measure projectively.  Passing a Bell
    operator kind uses the corresponding lossy POVMs for Bob, with the
    no-click event merged into outcome 0.
    """
    rho = _as_state(state).density
    pa = alice_povms(s)
    if kind is None:
        _, _, b0, b1 = canonical_directions(s)
        pb = (projective_povm(b0), projective_povm(b1))
    else:
        pb = bob_povms(s, Kind.parse(kind))
    table = np.empty((2, 2, 2, 2))
    for x, y, a, b in itertools.product(range(2), repeat=4):
        table[x, y, a, b] = np.trace(rho @ tensor(pa[x][a], pb[y][b])).real
    return validate_no_signaling(table)


@dataclass(frozen=True, eq=False)
class LHVModel:
    hidden_values: tuple    # (b', y') pairs
    prior: np.ndarray       # q(lambda)
    alice_channel: np.ndarray  # q(a | x, lambda), shape (L, X, A)
    bob_channel: np.ndarray    # q(b | y, lambda), shape (L, Y, B + 1); last column is no-click
    exact: bool = False

    @property
    def no_click(self) -> int:
        return self.bob_channel.shape[-1] - 1


def massar_pironio_model(p: NoSignalingDistribution, eta) -> LHVModel:
    na, nb, nx, ny = p.alphabets
    exact = p.exact
    eta = _to_fraction(eta) if exact else float(eta)
    if not 0 < eta <= (Fraction(1, ny) if exact else 1.0 / ny + 1e-15):
        if eta > 0:
            raise NoModelError(
                f"eta={eta} exceeds 1/|Y| = 1/{ny}: this construction has no local model there"
            )
        raise DomainError(f"eta must be positive, got {eta}")
    one = Fraction(1) if exact else 1.0
    relabel = one - eta * ny  # probability Bob turns a click into no-click
    marg_b = p.bob_marginal()  # [y, b]

    hidden, prior, alice, bob = [], [], [], []
    dtype = object if exact else float
    for y_, b_ in itertools.product(range(ny), range(nb)):
        pb = marg_b[y_, b_]
        if pb == 0 or (not exact and pb <= 0.0):
            continue
        hidden.append((b_, y_))
        prior.append(pb / ny)
        alice.append(p.table[:, y_, :, b_] / pb)  # [x, a]
        ch = np.full((ny, nb + 1), 0 * one, dtype=dtype)
        ch[:, nb] = one
        ch[y_, nb] = relabel
        ch[y_, b_] = one - relabel
        bob.append(ch)
    return LHVModel(
        tuple(hidden),
        np.array(prior, dtype=dtype),
        np.array(alice, dtype=dtype),
        np.array(bob, dtype=dtype),
        exact,
    )


def simulate(model: LHVModel) -> np.ndarray:
    """q[x, y, a, b] = sum_l q(l) q(a|x,l) q(b|y,l), with b ranging over B and no-click."""
    w = model.prior[:, None, None, None, None]
    a = model.alice_channel[:, :, None, :, None]
    b = model.bob_channel[:, None, :, None, :]
    return (w * a * b).sum(axis=0)


def sample(model: LHVModel, x: int, y: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Empirical q(a, b | x, y) from ``n`` seeded draws of the hidden variable."""
    prior = np.asarray(model.prior, dtype=float)
    lam = rng.choice(len(prior), size=n, p=prior / prior.sum())
    counts = np.zeros(model.alice_channel.shape[-1:] + model.bob_channel.shape[-1:])
    alice = np.asarray(model.alice_channel, dtype=float)
    bob = np.asarray(model.bob_channel, dtype=float)
    for l in range(len(prior)):
        k = int(np.sum(lam == l))
        if k == 0:
            continue
        a_out = rng.choice(alice.shape[-1], size=k, p=alice[l, x])
        b_out = rng.choice(bob.shape[-1], size=k, p=bob[l, y])
        np.add.at(counts, (a_out, b_out), 1)
    return counts / n


@dataclass(frozen=True)
class SimulationReport:
    passed: bool
    max_deviation: float
    index: tuple  # (x, y, a, b) of the largest deviation; b == |B| denotes no-click


def target_table(p: NoSignalingDistribution, eta) -> np.ndarray:
    """eta p(a,b|x,y) for clicks and (1 - eta) p(a|x) for no-click."""
    na, nb, nx, ny = p.alphabets
    eta = _to_fraction(eta) if p.exact else float(eta)
    dtype = object if p.exact else float
    out = np.empty((nx, ny, na, nb + 1), dtype=dtype)
    out[..., :nb] = eta * p.table
    pa = p.table.sum(axis=3)  # p(a|x) at each y; equal by no-signaling
    out[..., nb] = (1 - eta) * pa
    return out


def verify_simulation(p: NoSignalingDistribution, eta, q, tol: float = TOL) -> SimulationReport:
    target = target_table(p, eta)
    q = np.asarray(q, dtype=object if p.exact else float)
    if q.shape != target.shape:
        raise DomainError(f"simulated table has shape {q.shape}, expected {target.shape}")
    diff = np.vectorize(lambda v: abs(v), otypes=[object if p.exact else float])(q - target)
    flat = int(np.argmax(np.asarray(diff, dtype=float)))
    idx = np.unravel_index(flat, diff.shape)
    worst = diff[idx]
    passed = worst == 0 if p.exact else worst <= tol
    return SimulationReport(bool(passed), float(worst), tuple(int(i) for i in idx))


def coarse_grain(q) -> np.ndarray:
    """Merge Bob's no-click outcome into outcome 0."""
    q = np.array(q)
    out = q[..., :-1].copy()
    out[..., 0] = out[..., 0] + q[..., -1]
    return out


def chsh_from_table(p) -> float:
    """E(0,0) + E(0,1) + E(1,0) - E(1,1) for a binary table p[x, y, a, b]."""
    p = np.asarray(p, dtype=float)
    e = p[..., 0, 0] - p[..., 0, 1] - p[..., 1, 0] + p[..., 1, 1]
    return float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])


def pr_box(exact: bool = False) -> NoSignalingDistribution:
    half = Fraction(1, 2) if exact else 0.5
    table = np.full((2, 2, 2, 2), 0 * half, dtype=object if exact else float)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        if (a ^ b) == (x & y):
            table[x, y, a, b] = half
    return validate_no_signaling(table, exact=exact)


def deterministic_point(alice_outputs, bob_outputs, exact: bool = False) -> NoSignalingDistribution:
    """Local deterministic table: Alice answers alice_outputs[x], Bob bob_outputs[y]."""
    one = Fraction(1) if exact else 1.0
    nx, ny = len(alice_outputs), len(bob_outputs)
    table = np.full((nx, ny, 2, 2), 0 * one, dtype=object if exact else float)
    for x in range(nx):
        for y in range(ny):
            table[x, y, alice_outputs[x], bob_outputs[y]] = one
    return validate_no_signaling(table, exact=exact)


def random_mixture(rng: np.random.Generator, include_pr_box: bool = True) -> NoSignalingDistribution:
    """Random convex mixture of the 16 local deterministic points and the PR box."""
    points = [deterministic_point(a, b).table
              for a in itertools.product(range(2), repeat=2)
              for b in itertools.product(range(2), repeat=2)]
    if include_pr_box:
        points.append(pr_box().table)
    w = rng.dirichlet(np.ones(len(points)))
    return validate_no_signaling(np.tensordot(w, np.array(points), axes=1))
