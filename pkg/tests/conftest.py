import numpy as np
import pytest

from shiftprox.core import CompositeProblem, ProxOracle, SmoothOracle
from shiftprox.quadratic import from_arrays, make_instance


def quadratic_problem_1d(L=1.5, mu=1.0, rho=0.0, v=0.0):
    """f = x^2/2 (declared constants L, mu), h = rho/2 (x + v)^2."""
    smooth = SmoothOracle(eval=lambda x: 0.5 * float(x @ x), grad=lambda x: x.copy(),
                          lipschitz_L=L, strong_mu=mu)
    nonsmooth = ProxOracle(eval=lambda x: 0.5 * rho * float((x + v) @ (x + v)),
                           prox=lambda g, x: (x - g * rho * v) / (1 + g * rho),
                           strong_rho=rho)
    return CompositeProblem(smooth, nonsmooth, 1, reference_solution=np.zeros(1) if v == 0 else None)


@pytest.fixture
def problem_1d():
    return quadratic_problem_1d()


@pytest.fixture(scope="session")
def small_instance():
    return make_instance(20, 20, 0.58, 0.1, 0.1, seed=11)


@pytest.fixture(scope="session")
def tiny_mu_instance():
    return make_instance(50, 50, 0.0, 0.2, 0.1, seed=15)


@pytest.fixture(scope="session")
def large_mu_instance():
    return make_instance(50, 50, 0.58, 0.1, 0.1, seed=15)


@pytest.fixture
def diag_instance():
    return from_arrays(np.diag([1.0, 2.0]), [1.0, 1.0], [0.0, 0.0], 0.5)


# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE_LINES = {}


def record_criterion(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
