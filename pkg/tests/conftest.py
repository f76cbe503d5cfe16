import numpy as np
import pytest

from spin_engine import qmat

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def assert_close(a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    err = float(np.max(np.abs(a - b)))
    assert err <= tol if tol == 0 else err < tol, f"max deviation {err:.3e} >= {tol:.0e}"


def ket_projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


UP = ket_projector([1, 0])
DOWN = ket_projector([0, 1])
MIXED = qmat.IDENTITY / 2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
