"""Lyapunov energies and normalized convergence diagnostics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import CompositeProblem, UnavailableError, check_dimension, objective_value
from .rates import lyapunov_weight

CLAMP_TOL = 1e-12
FLOOR_FACTOR = 1e2 * np.finfo(float).eps


@dataclass(frozen=True)
class LyapunovSpec:
    """Energy ``F(x) - F(x*) + weight |z - x*|^2`` for constants ``(mu, rho, L)``.

    The constants may be shifted; ``F`` is always the unshifted objective
    since ``f_delta + h_{-delta} = f + h``.
    """

    mu: float
    rho: float
    L: float
    reference: np.ndarray
    reference_value: float

    @property
    def weight(self) -> float:
        return lyapunov_weight(self.mu, self.rho, self.L)

    @classmethod
    def for_problem(cls, p: CompositeProblem, delta: float = 0.0) -> "LyapunovSpec":
        xs = p.require_reference()
        return cls(p.mu + delta, p.rho - delta, p.L + delta, xs, p.reference_value)


def _excess(p: CompositeProblem, x, reference_value: float) -> float:
    return objective_value(p, x) - reference_value


def _clamp(value: float, what: str) -> float:
    if value < 0:
        if value < -CLAMP_TOL:
            raise ArithmeticError(f"{what} is negative ({value:.3e}); reference is not a minimizer")
        warnings.warn(f"{what} = {value:.3e} clamped to 0", RuntimeWarning, stacklevel=3)
        return 0.0
    return value


def phi_raw(spec: LyapunovSpec, p: CompositeProblem, x, z, value=None) -> float:
    """Unclamped energy. ``value`` may pass a precomputed ``F(x)``."""
    if not spec.mu > 0:
        raise UnavailableError("Lyapunov energy needs mu > 0 (after shifting)")
    z = np.asarray(z, dtype=float)
    check_dimension(p, z)
    if value is None:
        value = objective_value(p, np.asarray(x, dtype=float))
    dz = z - spec.reference
    return value - spec.reference_value + spec.weight * float(dz @ dz)


def phi(spec: LyapunovSpec, p: CompositeProblem, x, z) -> float:
    return _clamp(phi_raw(spec, p, x, z), "phi")


def fbs_energy_raw(p: CompositeProblem, x, value=None) -> float:
    xs = p.require_reference()
    x = np.asarray(x, dtype=float)
    if value is None:
        value = objective_value(p, x)
    d = x - xs
    return value - p.reference_value + 0.5 * (p.mu + p.rho) * float(d @ d)


def fbs_energy(p: CompositeProblem, x) -> float:
    """``F(x) - F(x*) + (mu + rho)/2 |x - x*|^2``."""
    return _clamp(fbs_energy_raw(p, x), "FBS energy")


@dataclass(frozen=True)
class NormalizedTraces:
    e: np.ndarray    # |x_k - x*| / |x_0 - x*|
    v: np.ndarray    # (F(x_k) - F*) / (F(x_0) - F*)
    ell: np.ndarray  # energy_k / energy_0; NaN where the energy is unavailable


def normalized_traces(run, p: CompositeProblem) -> NormalizedTraces:
    p.require_reference()
    dist = np.asarray(run.distances, dtype=float)
    if dist.size == 0 or dist[0] == 0.0:
        raise ValueError("x_0 equals x*: normalization is degenerate")
    gap = np.asarray(run.values, dtype=float) - p.reference_value
    if gap[0] <= 0.0:
        raise ValueError("F(x_0) equals F(x*): normalization is degenerate")
    if run.lyapunov is not None and run.lyapunov[0] > 0:
        ell = np.asarray(run.lyapunov, dtype=float) / run.lyapunov[0]
    else:
        ell = np.full(dist.shape, np.nan)
    return NormalizedTraces(dist / dist[0], gap / gap[0], ell)


def floor_index(seq, floor_factor: float = FLOOR_FACTOR) -> int:
    """Number of leading entries at or above ``floor_factor * seq[0]``."""
    seq = np.asarray(seq, dtype=float)
    below = np.nonzero(~(seq >= floor_factor * seq[0]))[0]
    return int(below[0]) if below.size else int(seq.size)


def empirical_rate(sequence, window: int = 20) -> float:
    """Geometric-mean per-step ratio over the trailing ``window`` steps.

    Only the leading part of the sequence above ``1e2 * eps * sequence[0]``
    is used; linear convergence reaches that floor quickly and ratios of
    rounding noise mean nothing. The window shrinks if fewer steps remain.
    """
    seq = np.asarray(sequence, dtype=float)
    if window < 2 or seq.size <= window:
        raise ValueError(f"need len(sequence) > window >= 2, got {seq.size} and {window}")
    if not seq[0] > 0 or not np.all(np.isfinite(seq)):
        raise ValueError("sequence must be finite with a positive first entry")
    k = floor_index(seq)
    if np.any(seq[:k] <= 0):
        raise ValueError("sequence must be positive")
    if k < 2:
        raise ValueError("sequence drops below the numerical floor immediately")
    w = min(window, k - 1)
    return float(math.exp((math.log(seq[k - 1]) - math.log(seq[k - 1 - w])) / w))
