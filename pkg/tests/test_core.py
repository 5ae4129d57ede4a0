import math

import numpy as np
import pytest

from shiftprox.core import (CompositeProblem, DimensionError, ProxOracle, SmoothOracle,
                            objective_value, validate_problem)
from shiftprox.quadratic import from_arrays, make_instance


def identity_problem():
    # f = |x|^2 / 2 (declared mu = 0, which is valid), h = |x|^2 / 2.
    smooth = SmoothOracle(lambda x: 0.5 * x @ x, lambda x: x.copy(), 1.0, 0.0)
    prox = ProxOracle(lambda x: 0.5 * x @ x, lambda g, x: x / (1 + g), 1.0)
    return CompositeProblem(smooth, prox, 3)


def test_objective_identity_instance():
    assert objective_value(identity_problem(), np.array([1.0, 0, 0])) == 1.0


def test_objective_2x2(diag_instance):
    p = diag_instance.to_problem()
    # 1/2 |A*0 - z|^2 + rho/2 |0|^2 = 1/2 * 2
    assert objective_value(p, np.zeros(2)) == 1.0


def test_objective_minimal_at_reference(diag_instance):
    p = diag_instance.to_problem()
    xs = p.reference_solution
    F0 = objective_value(p, xs)
    grid = np.linspace(-0.5, 0.5, 21)
    for dx in grid:
        for dy in grid:
            assert objective_value(p, xs + [dx, dy]) >= F0


def test_objective_infinite_h():
    smooth = SmoothOracle(lambda x: 0.0, lambda x: 0 * x, 1.0, 0.0)
    box = ProxOracle(lambda x: 0.0 if np.all(x >= 0) else math.inf,
                     lambda g, x: np.maximum(x, 0), 1.0)
    p = CompositeProblem(smooth, box, 2)
    assert objective_value(p, np.array([-1.0, 0])) == math.inf


def test_dimension_mismatch(diag_instance):
    with pytest.raises(DimensionError):
        objective_value(diag_instance.to_problem(), np.zeros(3))


def test_problem_hypotheses():
    with pytest.raises(ValueError):
        SmoothOracle(lambda x: 0, lambda x: x, 1.0, 1.0)  # mu == L
    smooth = SmoothOracle(lambda x: 0, lambda x: 0 * x, 1.0, 0.0)
    with pytest.raises(ValueError):
        CompositeProblem(smooth, ProxOracle(lambda x: 0, lambda g, x: x, 0.0), 2)


def test_validate_passes_on_instance(small_instance):
    report = validate_problem(small_instance.to_problem(), samples=100, seed=1)
    assert report.passed, report.format()
    assert {c.name for c in report.checks} >= {
        "smooth.lipschitz", "smooth.strong_convexity", "prox.lipschitz",
        "prox.characterization", "objective.convexity", "reference.growth"}


def test_validate_is_deterministic(small_instance):
    p = small_instance.to_problem()
    assert validate_problem(p, 20, seed=5) == validate_problem(p, 20, seed=5)


def _with_constants(inst, L, mu):
    base = inst.to_problem()
    smooth = SmoothOracle(base.smooth.eval, base.smooth.grad, L, mu)
    return CompositeProblem(smooth, base.nonsmooth, base.dimension)


def test_validate_catches_understated_L():
    inst = from_arrays(np.diag([0.3, 0.5, 1.0, 2.0]), np.ones(4), np.zeros(4), 0.1)
    # Oracle: top eigenvector of A^T A from a dense eigendecomposition violates L/2.
    w, V = np.linalg.eigh(inst.A.T @ inst.A)
    u = V[:, -1]
    L_bad = 0.5 * inst.L
    assert np.linalg.norm(inst.gram @ u) > L_bad * np.linalg.norm(u)
    report = validate_problem(_with_constants(inst, L_bad, 0.0), samples=50, seed=0)
    assert "smooth.lipschitz" in report.failed()


def test_validate_catches_overstated_mu():
    inst = make_instance(10, 10, 0.58, 0.1, 0.1, seed=4)
    w, V = np.linalg.eigh(inst.A.T @ inst.A)
    u = V[:, 0]
    mu_bad = w[-1] * 0.999  # essentially lambda_max, still below L
    f = inst.smooth_value
    # Oracle: along the bottom eigenvector the Bregman gap is below mu_bad/2 |u|^2.
    x = np.zeros(10)
    gap = f(x + u) - f(x) - (inst.gram @ x - inst.Atz) @ u
    assert gap < 0.5 * mu_bad
    report = validate_problem(_with_constants(inst, inst.L, mu_bad), samples=50, seed=0)
    assert "smooth.strong_convexity" in report.failed()
    assert report["smooth.lipschitz"].passed


def test_validate_catches_wrong_prox(small_instance):
    base = small_instance.to_problem()
    bad = ProxOracle(base.nonsmooth.eval, lambda g, x: x, base.rho)  # identity is not the prox
    p = CompositeProblem(base.smooth, bad, base.dimension)
    assert "prox.characterization" in validate_problem(p, 30, seed=2).failed()


def test_validate_samples_precondition(small_instance):
    with pytest.raises(ValueError):
        validate_problem(small_instance.to_problem(), samples=0)


def test_strong_convexity_growth(tiny_mu_instance):
    p = tiny_mu_instance.to_problem()
    xs, Fs = p.reference_solution, p.reference_value
    rng = np.random.default_rng(0)
    for _ in range(200):
        y = xs + rng.normal(size=p.dimension) * rng.uniform(0, 3)
        d = y - xs
        assert objective_value(p, y) >= Fs + 0.5 * (p.mu + p.rho) * d @ d - 1e-12 * abs(Fs)
