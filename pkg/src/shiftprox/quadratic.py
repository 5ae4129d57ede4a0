"""Tikhonov-shifted least squares test problem.

``F(x) = rho/2 |x + v|^2 + 1/2 |A x - z|^2`` split as ``h = rho/2 |x + v|^2``
and ``f = 1/2 |A x - z|^2``. Everything is in closed form: the gradient,
the prox, the constants ``L = |A^T A|`` and ``mu = lambda_min(A^T A)``, and
the minimizer ``x* = (rho I + A^T A)^{-1} (A^T z - rho v)``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .core import CompositeProblem, DimensionError, ProxOracle, SmoothOracle
from .prng import SeededGenerator, fill_matrix, fill_vector


class ShapeError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, msg: str, estimate: float):
        super().__init__(f"{msg} (last estimate {estimate!r})")
        self.estimate = estimate


class DegenerateSpectrumError(ValueError):
    """``mu == L``: the smooth part does not satisfy ``mu < L``."""


@dataclass(frozen=True, eq=False)
class QuadraticInstance:
    A: np.ndarray
    z_data: np.ndarray
    v_shift: np.ndarray
    rho: float
    L: float
    mu: float
    x_star: np.ndarray
    # generation metadata, None for hand-built instances
    n: int = 0
    m: int = 0
    a: Optional[float] = None
    b: Optional[float] = None
    seed: Optional[int] = None
    gram: np.ndarray = field(default=None, repr=False)
    Atz: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        m, n = self.A.shape
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        if self.gram is None:
            object.__setattr__(self, "gram", self.A.T @ self.A)
        if self.Atz is None:
            object.__setattr__(self, "Atz", self.A.T @ self.z_data)
        for arr in (self.A, self.z_data, self.v_shift, self.x_star, self.gram, self.Atz):
            arr.setflags(write=False)

    def smooth_value(self, x) -> float:
        r = self.A @ x - self.z_data
        return 0.5 * float(r @ r)

    def prox_value(self, x) -> float:
        d = x + self.v_shift
        return 0.5 * self.rho * float(d @ d)

    def objective(self, x) -> float:
        return self.smooth_value(x) + self.prox_value(x)

    def to_problem(self) -> CompositeProblem:
        smooth = SmoothOracle(
            eval=self.smooth_value,
            grad=lambda x: instance_grad(self, x),
            lipschitz_L=self.L,
            strong_mu=self.mu,
        )
        nonsmooth = ProxOracle(
            eval=self.prox_value,
            prox=lambda gamma, x: instance_prox(self, gamma, x),
            strong_rho=self.rho,
            subgrad=lambda x: self.rho * (x + self.v_shift),
        )
        return CompositeProblem(smooth, nonsmooth, self.n, reference_solution=self.x_star)


def _check_vec(inst: QuadraticInstance, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise DimensionError(f"expected a vector of length {inst.n}, got shape {x.shape}")
    return x


def instance_grad(inst: QuadraticInstance, x) -> np.ndarray:
    """``A^T (A x - z)``, computed as ``(A^T A) x - A^T z`` with one matvec."""
    x = _check_vec(inst, x)
    return inst.gram @ x - inst.Atz


def instance_prox(inst: QuadraticInstance, gamma: float, x) -> np.ndarray:
    """``(x - gamma rho v) / (1 + gamma rho)``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    x = _check_vec(inst, x)
    gr = gamma * inst.rho
    return (x - gr * inst.v_shift) / (1.0 + gr)


def exact_solution(A, z_data, v_shift, rho: float) -> np.ndarray:
    """Solve ``(rho I + A^T A) x = A^T z - rho v`` by Cholesky factorization."""
    if not rho > 0:
        raise ValueError("rho must be positive for a guaranteed factorization")
    A = np.asarray(A, dtype=float)
    M = A.T @ A
    M[np.diag_indices_from(M)] += rho
    rhs = A.T @ np.asarray(z_data, dtype=float) - rho * np.asarray(v_shift, dtype=float)
    try:
        factor = scipy.linalg.cho_factor(M, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"normal matrix is not numerically SPD: {exc}") from exc
    return scipy.linalg.cho_solve(factor, rhs)


def solution_residual(inst: QuadraticInstance) -> float:
    r = inst.rho * inst.x_star + inst.gram @ inst.x_star - (inst.Atz - inst.rho * inst.v_shift)
    return float(np.linalg.norm(r))


def _start_vector(n: int) -> np.ndarray:
    u = SeededGenerator(0x5EED).uniform_array(n) + 0.5
    return u / np.linalg.norm(u)


def _power(apply, n: int, tol: float, max_iters: int, what: str) -> float:
    u = _start_vector(n)
    lam_old = np.inf
    lam = 0.0
    for _ in range(max_iters):
        w = apply(u)
        lam = float(u @ w)  # Rayleigh quotient, |u| = 1
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        if abs(lam - lam_old) <= tol * abs(lam):
            return lam
        lam_old = lam
        u = w / nw
    raise ConvergenceError(f"{what} did not converge in {max_iters} iterations", lam)


def spectral_constants(A, tol: float = 1e-12, max_iters: int = 10_000,
                       method: str = "inverse") -> tuple:
    """``(L, mu)``: extreme eigenvalues of ``A^T A``.

    ``L`` comes from power iteration. ``mu`` comes from power iteration on
    ``(A^T A)^{-1}`` through a Cholesky factor (``method="inverse"``), or on
    ``L I - A^T A`` (``method="shifted"``). The shifted variant converges at
    ratio ``(L - lambda_2)/(L - lambda_1)``, hopeless for clustered small
    eigenvalues, so it is not the default. When ``A^T A`` is too singular to
    factorize, ``mu = 0`` is returned; a nearly singular one gives ``mu`` at
    rounding level.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    A = np.asarray(A, dtype=float)
    Q = A.T @ A
    n = Q.shape[0]
    L = _power(lambda u: Q @ u, n, tol, max_iters, "power iteration for L")
    if method == "shifted":
        top = _power(lambda u: L * u - Q @ u, n, tol, max_iters, "shifted power iteration for mu")
        return L, max(L - top, 0.0)
    if method != "inverse":
        raise ValueError(f"unknown method {method!r}")
    try:
        factor = scipy.linalg.cho_factor(Q, lower=True)
    except np.linalg.LinAlgError:
        return L, 0.0
    inv_top = _power(lambda u: scipy.linalg.cho_solve(factor, u), n, tol, max_iters,
                     "inverse iteration for mu")
    if not inv_top > 0 or not np.isfinite(inv_top):
        return L, 0.0
    return L, 1.0 / inv_top


def make_instance(n: int, m: int, a: float, b: float, rho: float, seed: int,
                  tol: float = 1e-12, max_iters: int = 10_000) -> QuadraticInstance:
    """Random instance ``A = A0 / |A0^T A0|^{1/2}`` with ``A0 = a I + b R``.

    Draw order from one seeded stream: ``R`` (``m x n``, row-major), then
    ``v`` (length ``n``), then ``z`` (length ``m``). ``R`` is drawn even when
    ``b == 0`` so that ``v`` and ``z`` depend on the seed only.
    """
    if n < 1 or m < 1:
        raise ShapeError("n and m must be positive")
    if a != 0 and n != m:
        raise ShapeError(f"a != 0 needs a square matrix, got m={m}, n={n}")
    if not rho > 0:
        raise ValueError("rho must be positive")
    g = SeededGenerator(seed)
    R = fill_matrix(g, m, n)
    v = fill_vector(g, n)
    z = fill_vector(g, m)
    A0 = b * R
    if a != 0:
        A0[np.diag_indices(n)] += a
    L0 = _power(lambda u: A0.T @ (A0 @ u), n, tol, max_iters, "power iteration for |A0^T A0|")
    if not L0 > 0:
        raise DegenerateSpectrumError("A0 is zero")
    A = A0 / np.sqrt(L0)
    L, mu = spectral_constants(A, tol=tol, max_iters=max_iters)
    if mu >= L * (1.0 - 1e-9):
        raise DegenerateSpectrumError(f"mu={mu} equals L={L}; need mu < L")
    x_star = exact_solution(A, z, v, rho)
    return QuadraticInstance(A=A, z_data=z, v_shift=v, rho=float(rho), L=L, mu=mu,
                             x_star=x_star, a=float(a), b=float(b), seed=int(seed))


def from_arrays(A, z_data, v_shift, rho: float, **meta) -> QuadraticInstance:
    """Instance from explicit data; constants and ``x*`` are computed."""
    A = np.array(A, dtype=float, ndmin=2)
    z_data = np.array(z_data, dtype=float)
    v_shift = np.array(v_shift, dtype=float)
    if z_data.shape != (A.shape[0],) or v_shift.shape != (A.shape[1],):
        raise ShapeError("z must have length m and v length n for an m x n matrix")
    L, mu = spectral_constants(A)
    if mu >= L * (1.0 - 1e-9):
        raise DegenerateSpectrumError(f"mu={mu} equals L={L}; need mu < L")
    return QuadraticInstance(A=A, z_data=z_data, v_shift=v_shift, rho=float(rho), L=L, mu=mu,
                             x_star=exact_solution(A, z_data, v_shift, rho), **meta)


# -- text serialization -------------------------------------------------------

_FMT = "{:.17g}"


def dumps(inst: QuadraticInstance) -> str:
    """Self-describing text form; 17 significant digits round-trip doubles exactly."""
    out = io.StringIO()
    out.write("# shiftprox quadratic instance v1\n")
    for key in ("n", "m", "a", "b", "seed"):
        val = getattr(inst, key)
        out.write(f"{key} {'none' if val is None else val}\n")
    for key in ("rho", "L", "mu"):
        out.write(f"{key} {_FMT.format(getattr(inst, key))}\n")
    out.write(f"A {inst.m} {inst.n}\n")
    for row in inst.A:
        out.write(" ".join(_FMT.format(x) for x in row) + "\n")
    for key, arr in (("z", inst.z_data), ("v", inst.v_shift), ("x_star", inst.x_star)):
        out.write(f"{key} {arr.size}\n")
        out.write(" ".join(_FMT.format(x) for x in arr) + "\n")
    return out.getvalue()


def loads(text: str) -> QuadraticInstance:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    it = iter(lines)
    meta = {}
    for key in ("n", "m", "a", "b", "seed", "rho", "L", "mu"):
        k, val = next(it).split(maxsplit=1)
        if k != key:
            raise ValueError(f"expected field {key!r}, found {k!r}")
        meta[key] = val
    k, m, n = next(it).split()
    if k != "A":
        raise ValueError(f"expected field 'A', found {k!r}")
    A = np.array([[float(t) for t in next(it).split()] for _ in range(int(m))])
    arrays = {}
    for key in ("z", "v", "x_star"):
        k, size = next(it).split()
        if k != key:
            raise ValueError(f"expected field {key!r}, found {k!r}")
        arrays[key] = np.array([float(t) for t in next(it).split()])
        if arrays[key].size != int(size):
            raise ValueError(f"field {key!r} has wrong length")

    def opt(val, cast):
        return None if val == "none" else cast(val)

    return QuadraticInstance(
        A=A, z_data=arrays["z"], v_shift=arrays["v"], rho=float(meta["rho"]),
        L=float(meta["L"]), mu=float(meta["mu"]), x_star=arrays["x_star"],
        a=opt(meta["a"], float), b=opt(meta["b"], float), seed=opt(meta["seed"], int))
