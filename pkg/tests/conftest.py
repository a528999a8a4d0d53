import numpy as np
import pytest

from pabcd.problem import SolverState, build_lasso
from pabcd.sparse import SparseMatrix

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def identity_problem():
    A = SparseMatrix.from_dense(np.eye(2))
    return build_lasso(A, np.array([1.0, -1.0]), 0.0)


def random_problem(seed, rows=6, cols=4, density=0.6, lam=0.3):
    rng = np.random.default_rng(seed)
    dense = rng.normal(size=(rows, cols)) * (rng.random((rows, cols)) < density)
    dense[rng.integers(rows), :] += 1.0  # no zero columns
    b = rng.normal(size=rows)
    return build_lasso(SparseMatrix.from_dense(dense), b, lam), dense, b


def random_state(p, seed):
    rng = np.random.default_rng(seed)
    x = rng.exponential(size=p.n_vars) * (rng.random(p.n_vars) < 0.6)
    return SolverState.initial(p, x)
