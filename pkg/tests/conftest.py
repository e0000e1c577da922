import math

import numpy as np
import pytest

from herglotz_sl import configs
from herglotz_sl.grid import BlockVector, GridFunction, Mesh

PI = math.pi


@pytest.fixture(scope="session")
def continuous():
    return configs.continuous()


@pytest.fixture(scope="session")
def double():
    return configs.double_eigenvalue()


@pytest.fixture(scope="session")
def no_double():
    return configs.no_double_slice()


@pytest.fixture(scope="session")
def full():
    return configs.full_herglotz()


@pytest.fixture(scope="session")
def coincident():
    return configs.coincident_poles()


@pytest.fixture(scope="session")
def step():
    return configs.step_potential()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cos_rhs(problem, h=1e-3):
    mesh = Mesh.for_problem(problem, h=h)
    return GridFunction.from_callable(mesh, np.cos)


def random_block(problem, rng, h=1e-3, complex_=True):
    """Smooth random right-hand side with random vector parts."""
    mesh = Mesh.for_problem(problem, h=h)
    c = rng.normal(size=(2, 4)) + (1j * rng.normal(size=(2, 4)) if complex_ else 0)
    k = np.arange(1, 5)

    def side(coef, x):
        return np.sum(coef[:, None] * np.cos(np.outer(k, x) / 2 + k[:, None]), axis=0)

    f = GridFunction(mesh, side(c[0], mesh.left), side(c[1], mesh.right))
    n1, n2 = problem.mu_block.size, problem.nu_block.size
    cplx = (lambda n: rng.normal(size=n) + 1j * rng.normal(size=n)) if complex_ else rng.normal
    return BlockVector(f, cplx(n1), cplx(n2))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
