"""Forward-backward and fixed-inertia FISTA iterations with trace capture."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (Algorithm, CompositeProblem, DivergenceError, check_dimension,
                   objective_value)
from .lyapunov import LyapunovSpec, fbs_energy_raw, phi_raw
from .rates import fbs_rate, fista_delta_certificate
from .shift import StepSizeError


@dataclass(frozen=True)
class SolverConfig:
    """Iteration settings. ``None`` picks the per-algorithm default.

    Defaults: FBS step ``2/(L+mu)``; FISTA step ``1/L`` with the inertia
    that makes the Lyapunov energy contract; FISTA_DELTA shift ``rho``;
    z-form coupling from the same constants.
    """

    algorithm: Algorithm = Algorithm.FISTA
    max_iters: int = 500
    gamma: Optional[float] = None
    alpha: Optional[float] = None
    delta: Optional[float] = None
    c_coupling: Optional[float] = None
    stop_tolerance: float = 0.0
    record_z: bool = True
    store_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.gamma is not None and not self.gamma > 0:
            raise StepSizeError(f"gamma must be positive, got {self.gamma}")
        if self.alpha is not None and not self.alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.c_coupling is not None and not 0 < self.c_coupling < 1:
            raise ValueError(f"c_coupling must lie in ]0, 1[, got {self.c_coupling}")
        if self.stop_tolerance < 0:
            raise ValueError("stop_tolerance must be nonnegative")
        if self.store_every < 1:
            raise ValueError("store_every must be >= 1")


@dataclass
class SolverRun:
    algorithm: Algorithm
    gamma: float
    alpha: float = 0.0
    c_coupling: Optional[float] = None
    delta: Optional[float] = None
    certificate_rate: Optional[float] = None
    xs: list = field(default_factory=list)
    ys: Optional[list] = None
    zs: Optional[list] = None
    stored_indices: list = field(default_factory=list)
    values: list = field(default_factory=list)
    distances: Optional[list] = None
    lyapunov: Optional[list] = None
    z_available: bool = True
    stopped_early: bool = False
    clamped: int = 0
    notes: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.values) - 1

    @property
    def x_final(self) -> np.ndarray:
        return self.xs[-1]


def stop_check(prev, nxt, tol: float) -> bool:
    """``|next - prev| <= tol (1 + |next|)``; ``tol == 0`` never stops."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if tol == 0:
        return False
    return bool(np.linalg.norm(nxt - prev) <= tol * (1.0 + np.linalg.norm(nxt)))


def _start(p: CompositeProblem, x0) -> np.ndarray:
    x = np.zeros(p.dimension) if x0 is None else np.array(x0, dtype=float)
    check_dimension(p, x)
    if not math.isfinite(objective_value(p, x)):
        raise ValueError("F(x0) must be finite")
    return x


class _Recorder:
    """Collects scalar traces every step and iterates every ``store_every`` steps."""

    def __init__(self, run: SolverRun, p: CompositeProblem, cfg: SolverConfig,
                 energy=None, keep_y: bool = False, keep_z: bool = False):
        self.run, self.p, self.stride = run, p, cfg.store_every
        self.energy = energy
        self.keep_y, self.keep_z = keep_y, keep_z
        if keep_y:
            run.ys = []
        if keep_z:
            run.zs = []
        if p.has_reference:
            run.distances = []
        if energy is not None:
            run.lyapunov = []
        self._pending = None

    def record(self, k: int, x, y=None, z=None, final: bool = False):
        run, p = self.run, self.p
        val = objective_value(p, x)
        if not math.isfinite(val) or not np.all(np.isfinite(x)):
            raise DivergenceError(run.algorithm.value, k)
        run.values.append(val)
        if run.distances is not None:
            run.distances.append(float(np.linalg.norm(x - p.reference_solution)))
        if self.energy is not None:
            e = self.energy(x, z, val)
            if e < 0:
                run.clamped += 1
                e = 0.0
            run.lyapunov.append(e)
        if k % self.stride == 0 or final:
            self._store(k, x, y, z)
            self._pending = None
        else:
            self._pending = (k, x, y, z)

    def _store(self, k, x, y, z):
        run = self.run
        run.stored_indices.append(k)
        run.xs.append(x)
        if self.keep_y:
            run.ys.append(y)
        if self.keep_z:
            run.zs.append(z)

    def finish(self):
        if self._pending is not None:
            self._store(*self._pending)
            self._pending = None


def fbs_run(p: CompositeProblem, cfg: SolverConfig = SolverConfig(Algorithm.FBS),
            x0=None) -> SolverRun:
    """``x_{k+1} = prox_{gamma h}(x_k - gamma grad f(x_k))``."""
    L, mu, rho = p.L, p.mu, p.rho
    gamma = cfg.gamma if cfg.gamma is not None else 2.0 / (L + mu)
    if not gamma < 2.0 / L:
        warnings.warn(f"FBS step {gamma} is not below 2/L = {2.0 / L}", RuntimeWarning,
                      stacklevel=2)
    run = SolverRun(Algorithm.FBS, gamma=gamma, alpha=0.0)
    if cfg.gamma is None:
        run.certificate_rate = fbs_rate(mu, rho, L)
    energy = (lambda x, z, val: fbs_energy_raw(p, x, val)) if p.has_reference else None
    rec = _Recorder(run, p, cfg, energy=energy)
    x = _start(p, x0)
    rec.record(0, x)
    prox, grad = p.nonsmooth.prox, p.smooth.grad
    for k in range(cfg.max_iters):
        x_new = prox(gamma, x - gamma * grad(x))
        stop = stop_check(x, x_new, cfg.stop_tolerance)
        x = x_new
        rec.record(k + 1, x, final=stop or k + 1 == cfg.max_iters)
        if stop:
            run.stopped_early = True
            break
    rec.finish()
    return run


def _fista_loop(p, cfg, run, gamma, alpha, x0, y0, z_coef, energy):
    keep_z = cfg.record_z and z_coef is not None
    rec = _Recorder(run, p, cfg, energy=energy, keep_y=True, keep_z=keep_z)
    x = _start(p, x0)
    y = x.copy() if y0 is None else np.array(y0, dtype=float)
    check_dimension(p, y)

    def zof(x, y):
        return None if z_coef is None else x + z_coef * (y - x)

    rec.record(0, x, y, zof(x, y))
    prox, grad = p.nonsmooth.prox, p.smooth.grad
    for k in range(cfg.max_iters):
        x_new = prox(gamma, y - gamma * grad(y))
        y = x_new + alpha * (x_new - x)
        stop = stop_check(x, x_new, cfg.stop_tolerance)
        x = x_new
        rec.record(k + 1, x, y, zof(x, y), final=stop or k + 1 == cfg.max_iters)
        if stop:
            run.stopped_early = True
            break
    rec.finish()
    return run


def _energy_for(p: CompositeProblem, delta: float, cert):
    if cert.degenerate or not p.has_reference:
        return None
    spec = LyapunovSpec.for_problem(p, delta)
    return lambda x, z, val: phi_raw(spec, p, x, z, value=val)


def fista_run(p: CompositeProblem, cfg: SolverConfig = SolverConfig(), x0=None,
              y0=None) -> SolverRun:
    """Fixed-inertia FISTA ``x_{k+1} = prox(y_k - gamma grad f(y_k))``,
    ``y_{k+1} = x_{k+1} + alpha (x_{k+1} - x_k)``.

    ``z_k = x_k + (y_k - x_k)/c`` and the Lyapunov energy use the constants
    of the problem. They certify the rate only with the default step and
    inertia; with overrides they are still recorded, as plain diagnostics.
    """
    L, mu, rho = p.L, p.mu, p.rho
    cert = fista_delta_certificate(mu, rho, L, 0.0)
    gamma = cfg.gamma if cfg.gamma is not None else 1.0 / L
    alpha = cfg.alpha if cfg.alpha is not None else cert.inertia_alpha
    if gamma > 1.0 / L * (1 + 1e-12):
        warnings.warn(f"FISTA step {gamma} exceeds 1/L = {1.0 / L}", RuntimeWarning,
                      stacklevel=2)
    run = SolverRun(Algorithm.FISTA, gamma=gamma, alpha=alpha, c_coupling=cert.coupling_c,
                    delta=0.0)
    if cfg.gamma is None and cfg.alpha is None and not cert.degenerate:
        run.certificate_rate = cert.contraction
    if cert.degenerate:
        run.z_available = False
        run.notes.append("mu = 0: z sequence and Lyapunov energy unavailable")
    z_coef = None if cert.degenerate else cert.z_coefficient
    return _fista_loop(p, cfg, run, gamma, alpha, x0, y0, z_coef, _energy_for(p, 0.0, cert))


def fista_delta_run(p: CompositeProblem, cfg: SolverConfig = SolverConfig(Algorithm.FISTA_DELTA),
                    x0=None, y0=None) -> SolverRun:
    """FISTA on ``f, h`` at step ``1/L`` with the inertia of the ``delta``-shifted split.

    The energy and ``z`` use the shifted constants ``(mu+delta, rho-delta, L+delta)``.
    """
    L, mu, rho = p.L, p.mu, p.rho
    delta = cfg.delta if cfg.delta is not None else rho
    cert = fista_delta_certificate(mu, rho, L, delta)
    gamma = cfg.gamma if cfg.gamma is not None else 1.0 / L
    alpha = cfg.alpha if cfg.alpha is not None else cert.inertia_alpha
    run = SolverRun(Algorithm.FISTA_DELTA, gamma=gamma, alpha=alpha,
                    c_coupling=cert.coupling_c, delta=delta)
    if cfg.gamma is None and cfg.alpha is None and not cert.degenerate:
        run.certificate_rate = cert.contraction
    if cert.degenerate:
        run.z_available = False
        run.notes.append("mu + delta = 0: z sequence and Lyapunov energy unavailable")
    z_coef = None if cert.degenerate else cert.z_coefficient
    return _fista_loop(p, cfg, run, gamma, alpha, x0, y0, z_coef, _energy_for(p, delta, cert))


def fista_zform_run(p: CompositeProblem, cfg: SolverConfig = SolverConfig(Algorithm.FISTA_ZFORM),
                    x0=None, z0=None) -> SolverRun:
    """Three-sequence form of FISTA with coupling ``c``::

        y_k     = x_k + c (z_k - x_k)
        x_{k+1} = prox_{gamma h}(y_k - gamma grad f(y_k))
        z_{k+1} = alpha/(1-c) z_k - alpha/(c(1-c)) y_k + (c+alpha)/c x_{k+1}

    Started from ``(x0, z0)`` it reproduces :func:`fista_run` started from
    ``x0`` and ``y0 = x0 + c (z0 - x0)``.
    """
    L, mu, rho = p.L, p.mu, p.rho
    cert = fista_delta_certificate(mu, rho, L, 0.0)
    gamma = cfg.gamma if cfg.gamma is not None else 1.0 / L
    alpha = cfg.alpha if cfg.alpha is not None else cert.inertia_alpha
    if cfg.c_coupling is not None:
        c = cfg.c_coupling
    elif not cert.degenerate:
        c = cert.coupling_c
    else:
        raise ValueError("mu = 0: pass c_coupling explicitly")
    run = SolverRun(Algorithm.FISTA_ZFORM, gamma=gamma, alpha=alpha, c_coupling=c, delta=0.0)
    defaults = cfg.gamma is None and cfg.alpha is None and cfg.c_coupling is None
    if defaults and not cert.degenerate:
        run.certificate_rate = cert.contraction
    energy = _energy_for(p, 0.0, cert)
    rec = _Recorder(run, p, cfg, energy=energy, keep_y=True, keep_z=True)
    x = _start(p, x0)
    z = x.copy() if z0 is None else np.array(z0, dtype=float)
    check_dimension(p, z)
    a_z, a_y, a_x = alpha / (1 - c), alpha / (c * (1 - c)), (c + alpha) / c
    prox, grad = p.nonsmooth.prox, p.smooth.grad
    y = x + c * (z - x)
    rec.record(0, x, y, z)
    for k in range(cfg.max_iters):
        x_new = prox(gamma, y - gamma * grad(y))
        z = a_z * z - a_y * y + a_x * x_new
        stop = stop_check(x, x_new, cfg.stop_tolerance)
        x = x_new
        y = x + c * (z - x)
        rec.record(k + 1, x, y, z, final=stop or k + 1 == cfg.max_iters)
        if stop:
            run.stopped_early = True
            break
    rec.finish()
    return run


def solve(p: CompositeProblem, cfg: SolverConfig, x0=None, y0=None) -> SolverRun:
    """Dispatch on ``cfg.algorithm``; ``y0`` is ``z0`` for the z-form."""
    if cfg.algorithm is Algorithm.FBS:
        return fbs_run(p, cfg, x0)
    if cfg.algorithm is Algorithm.FISTA:
        return fista_run(p, cfg, x0, y0)
    if cfg.algorithm is Algorithm.FISTA_DELTA:
        return fista_delta_run(p, cfg, x0, y0)
    return fista_zform_run(p, cfg, x0, y0)
