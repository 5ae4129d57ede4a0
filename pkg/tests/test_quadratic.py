import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftprox.core import DimensionError
from shiftprox.quadratic import (ConvergenceError, DegenerateSpectrumError, QuadraticInstance,
                                 ShapeError, dumps, exact_solution, from_arrays, instance_grad,
                                 instance_prox, loads, make_instance, solution_residual,
                                 spectral_constants)
from shiftprox.shift import forward_backward_map, shift


def hand_instance(A, z, v, rho, L=1.0, mu=1.0):
    """Bypasses the mu < L check, for degenerate textbook examples."""
    A = np.array(A, dtype=float, ndmin=2)
    z, v = np.array(z, dtype=float), np.array(v, dtype=float)
    return QuadraticInstance(A=A, z_data=z, v_shift=v, rho=rho, L=L, mu=mu,
                             x_star=exact_solution(A, z, v, rho))


def random_instance(n=5, seed=0, rho=0.3):
    rng = np.random.default_rng(seed)
    return from_arrays(rng.normal(size=(n, n)), rng.normal(size=n), rng.normal(size=n), rho)


# -- gradient ----------------------------------------------------------------

def test_grad_vanishes_at_interpolant():
    inst = random_instance()
    x = np.linalg.solve(inst.A, inst.z_data)
    assert np.linalg.norm(instance_grad(inst, x)) <= 1e-12 * (1 + np.linalg.norm(inst.Atz))


def test_grad_identity_example():
    inst = hand_instance(np.eye(3), np.zeros(3), np.zeros(3), 1.0)
    np.testing.assert_array_equal(instance_grad(inst, [1.0, 0, 0]), [1.0, 0, 0])


def test_grad_finite_differences():
    inst = random_instance(seed=4)
    x = np.random.default_rng(9).normal(size=5)
    h = 1e-6
    fd = np.array([(inst.smooth_value(x + h * e) - inst.smooth_value(x - h * e)) / (2 * h)
                   for e in np.eye(5)])
    assert np.max(np.abs(fd - instance_grad(inst, x))) <= 1e-6 * (1 + np.linalg.norm(fd))


def test_grad_dimension_error(small_instance):
    with pytest.raises(DimensionError):
        instance_grad(small_instance, np.zeros(small_instance.n + 1))


# -- prox --------------------------------------------------------------------

def test_prox_examples():
    inst = hand_instance([[1.0]], [0.0], [0.0], 2.0)
    np.testing.assert_allclose(instance_prox(inst, 0.5, [2.0]), [1.0], rtol=1e-15)
    np.testing.assert_allclose(instance_prox(inst, 1e-12, [2.0]), [2.0], atol=1e-9)
    with pytest.raises(ValueError):
        instance_prox(inst, 0.0, [2.0])


@settings(max_examples=40, deadline=None)
@given(gamma=st.floats(0.05, 5.0), rho=st.floats(0.05, 5.0), v=st.floats(-3, 3),
       x=st.floats(-3, 3))
def test_prox_grid_oracle(gamma, rho, v, x):
    inst = hand_instance([[1.0]], [0.0], [v], rho)
    lo, hi = -10.0, 10.0
    for _ in range(4):
        grid = np.linspace(lo, hi, 20001)
        obj = 0.5 * rho * (grid + v) ** 2 + (grid - x) ** 2 / (2 * gamma)
        i = int(np.argmin(obj))
        lo, hi = grid[max(i - 2, 0)], grid[min(i + 2, grid.size - 1)]
    assert abs(instance_prox(inst, gamma, [x])[0] - grid[i]) <= 1e-6


# -- exact solution ----------------------------------------------------------

def test_exact_solution_examples():
    z = np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(exact_solution(np.eye(3), z, np.zeros(3), 1.0), z / 2, rtol=1e-15)
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4))
    xh = rng.normal(size=4)
    np.testing.assert_allclose(exact_solution(A, A @ xh, -xh, 0.7), xh, rtol=1e-10)
    np.testing.assert_allclose(exact_solution(np.diag([1.0, 2.0]), [1, 1], [0, 0], 0.5),
                               [1 / 1.5, 2 / 4.5], rtol=1e-15)


def test_exact_solution_errors():
    with pytest.raises(ValueError):
        exact_solution(np.eye(2), [1, 1], [0, 0], 0.0)
    # non-finite data cannot be factorized
    with pytest.raises((ValueError, np.linalg.LinAlgError)):
        exact_solution(np.array([[np.nan, 0.0], [0.0, 1.0]]), [1, 1], [0, 0], 1.0)


def test_residual_invariant(tiny_mu_instance, large_mu_instance, small_instance):
    for inst in (tiny_mu_instance, large_mu_instance, small_instance):
        assert solution_residual(inst) <= 1e-10 * (1 + np.linalg.norm(inst.Atz))


def test_solution_is_fixed_point(large_mu_instance):
    inst = large_mu_instance
    p = inst.to_problem()
    for d in (-p.mu, 0.0, p.rho / 2, p.rho):
        s = shift(p, d)
        for g in (0.3 / p.L, 1.0 / p.L, 1.9 / (p.L + d)):
            out = forward_backward_map(s, g, inst.x_star)
            assert np.linalg.norm(out - inst.x_star) <= 1e-9


# -- spectral constants ------------------------------------------------------

def test_spectral_examples():
    L, mu = spectral_constants(np.diag([1.0, 2.0]))
    assert L == pytest.approx(4.0, rel=1e-12) and mu == pytest.approx(1.0, rel=1e-12)
    L, mu = spectral_constants(np.eye(6))
    assert L == pytest.approx(1.0, rel=1e-12) and mu == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("method", ["inverse", "shifted"])
def test_spectral_matches_dense_eigensolve(method):
    inst = make_instance(20, 20, 0.58, 0.1, 0.1, seed=3)
    eig = np.linalg.eigvalsh(inst.A.T @ inst.A)
    L, mu = spectral_constants(inst.A, method=method)
    assert L == pytest.approx(eig[-1], rel=1e-8)
    assert mu == pytest.approx(eig[0], rel=1e-8)


def test_spectral_matches_dense_tiny_mu(tiny_mu_instance):
    eig = np.linalg.eigvalsh(tiny_mu_instance.A.T @ tiny_mu_instance.A)
    assert tiny_mu_instance.L == pytest.approx(eig[-1], rel=1e-8)
    assert tiny_mu_instance.mu == pytest.approx(eig[0], rel=1e-6)


def test_spectral_upper_bound(small_instance):
    rng = np.random.default_rng(5)
    for _ in range(100):
        u = rng.normal(size=small_instance.n)
        assert np.linalg.norm(small_instance.gram @ u) <= small_instance.L * np.linalg.norm(u) * (1 + 1e-7)


def test_spectral_errors():
    with pytest.raises(ValueError):
        spectral_constants(np.eye(2), tol=0.0)
    with pytest.raises(ValueError):
        spectral_constants(np.eye(2), method="lanczos")
    A = np.diag([1.0, 0.999999, 0.5])
    with pytest.raises(ConvergenceError) as info:
        spectral_constants(A, tol=1e-15, max_iters=3)
    assert info.value.estimate > 0


def test_singular_gram_gives_zero_mu():
    L, mu = spectral_constants(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert L == pytest.approx(4.0) and 0.0 <= mu <= 1e-12 * L


# -- generator ---------------------------------------------------------------

def test_make_instance_normalized(small_instance, tiny_mu_instance, large_mu_instance):
    for inst in (small_instance, tiny_mu_instance, large_mu_instance):
        assert abs(inst.L - 1.0) <= 1e-8
        assert 0 <= inst.mu <= inst.L


def test_mu_magnitude_classes(tiny_mu_instance, large_mu_instance):
    # published draws: 1.476e-6 and 0.0105
    assert 1e-7 <= tiny_mu_instance.mu < 1e-5
    assert 1e-3 <= large_mu_instance.mu < 1e-1


def test_make_instance_errors():
    with pytest.raises(ShapeError):
        make_instance(4, 5, 1.0, 0.1, 0.1, seed=0)
    with pytest.raises(DegenerateSpectrumError):
        make_instance(6, 6, 1.0, 0.0, 0.1, seed=0)
    with pytest.raises(ValueError):
        make_instance(4, 4, 0.0, 0.1, 0.0, seed=0)


def test_rectangular_instance():
    inst = make_instance(5, 8, 0.0, 1.0, 0.2, seed=2)
    assert inst.A.shape == (8, 5) and inst.z_data.shape == (8,) and inst.v_shift.shape == (5,)


def test_make_instance_deterministic():
    a = make_instance(10, 10, 0.58, 0.1, 0.1, seed=21)
    b = make_instance(10, 10, 0.58, 0.1, 0.1, seed=21)
    c = make_instance(10, 10, 0.58, 0.1, 0.1, seed=22)
    np.testing.assert_array_equal(a.A, b.A)
    np.testing.assert_array_equal(a.x_star, b.x_star)
    assert not np.array_equal(a.A, c.A)


def test_shared_vectors_across_configurations():
    a = make_instance(10, 10, 0.0, 0.2, 0.1, seed=8)
    b = make_instance(10, 10, 0.58, 0.1, 0.02, seed=8)
    np.testing.assert_array_equal(a.v_shift, b.v_shift)
    np.testing.assert_array_equal(a.z_data, b.z_data)


def test_instance_arrays_read_only(small_instance):
    with pytest.raises(ValueError):
        small_instance.A[0, 0] = 1.0


def test_from_arrays_errors():
    with pytest.raises(ShapeError):
        from_arrays(np.eye(2), [1.0], [0.0, 0.0], 1.0)
    with pytest.raises(DegenerateSpectrumError):
        from_arrays(np.eye(2), [1.0, 1.0], [0.0, 0.0], 1.0)


def test_diag_fixture(diag_instance):
    assert diag_instance.L == pytest.approx(4.0) and diag_instance.mu == pytest.approx(1.0)
    np.testing.assert_allclose(diag_instance.x_star, [1 / 1.5, 2 / 4.5], rtol=1e-14)


def test_to_problem_consistency(small_instance):
    p = small_instance.to_problem()
    x = np.linspace(-1, 1, small_instance.n)
    assert p.L == small_instance.L and p.mu == small_instance.mu and p.rho == small_instance.rho
    assert p.reference_value == pytest.approx(small_instance.objective(small_instance.x_star))
    np.testing.assert_array_equal(p.smooth.grad(x), instance_grad(small_instance, x))


# -- serialization -----------------------------------------------------------

def test_serialization_round_trip(small_instance):
    text = dumps(small_instance)
    back = loads(text)
    np.testing.assert_array_equal(back.A, small_instance.A)
    np.testing.assert_array_equal(back.z_data, small_instance.z_data)
    np.testing.assert_array_equal(back.v_shift, small_instance.v_shift)
    np.testing.assert_array_equal(back.x_star, small_instance.x_star)
    assert (back.rho, back.L, back.mu) == (small_instance.rho, small_instance.L, small_instance.mu)
    assert (back.a, back.b, back.seed) == (small_instance.a, small_instance.b, small_instance.seed)
    assert dumps(back) == text


def test_serialization_hand_built(diag_instance):
    back = loads(dumps(diag_instance))
    assert back.seed is None and back.a is None
    np.testing.assert_array_equal(back.A, diag_instance.A)


def test_serialization_rejects_garbage(small_instance):
    text = dumps(small_instance).replace("rho ", "rho_typo ", 1)
    with pytest.raises(ValueError):
        loads(text)
