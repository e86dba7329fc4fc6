import numpy as np
import pytest

ACCEPTANCE_LINES = []


def random_hermitian(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (x + x.conj().T)


def random_unitary(rng, n=2):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""
    def _report(criterion, passed, detail):
        ACCEPTANCE_LINES.append(f"[criterion {criterion}] {'PASS' if passed else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
