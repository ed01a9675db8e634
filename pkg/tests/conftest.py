import numpy as np
import pytest

from icoswitch.linalg import StateVector, UnitaryMatrix

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    # fix column phases so the distribution is Haar
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return UnitaryMatrix(q)


def random_state(rng, dims):
    n = int(np.prod(dims))
    return StateVector.normalized(dims, rng.normal(size=n) + 1j * rng.normal(size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[1])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
