"""Shared fixtures: the worked systems and a scenario-file loader."""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from jordan import JordanDecomposition  # noqa: E402
from ratmat import Matrix  # noqa: E402
from sampling import make_rng  # noqa: E402
from scenario import load_scenario  # noqa: E402

FIXTURES = ROOT / 'fixtures'


def diag(*values):
    n = len(values)
    return Matrix([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)


@pytest.fixture
def example1_jordan():
    """J = [a] + J_2(a) + [b] with a = 2, b = 3, T = I."""
    J = Matrix([[2, 0, 0, 0],
                [0, 2, 1, 0],
                [0, 0, 2, 0],
                [0, 0, 0, 3]])
    return JordanDecomposition.from_jordan_matrix(J)


@pytest.fixture
def diagonal_plant():
    """A = diag(3/10, 3/10, 3/10, 1/10, 1/5), B = [0 0 1 0 1]^T."""
    A = diag('3/10', '3/10', '3/10', '1/10', '1/5')
    B = Matrix([[0], [0], [1], [0], [1]])
    return A, B


@pytest.fixture
def swap_plant():
    """Swap of the first and last coordinate pairs: eigenvalues +1 and -1, each twice."""
    return Matrix([[0, 0, 1, 0],
                   [0, 0, 0, 1],
                   [1, 0, 0, 0],
                   [0, 1, 0, 0]])


@pytest.fixture
def rng():
    return make_rng(2024)


@pytest.fixture
def fixture_path():
    def _path(name):
        return FIXTURES / f"{name}.json"
    return _path


@pytest.fixture
def scenario(fixture_path):
    def _load(name):
        return load_scenario(fixture_path(name))
    return _load


@pytest.fixture(scope='session', autouse=True)
def _quiet_logging(tmp_path_factory):
    """Route the session log to a temp file; the CLI's own setup then becomes a no-op."""
    from app_logging import setup_logging
    setup_logging('DEBUG', tmp_path_factory.mktemp('logs') / 'obsgame.log', console=False)
