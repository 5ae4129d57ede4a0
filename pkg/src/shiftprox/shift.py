"""Moving strong convexity between the smooth and the prox part.

For ``delta`` in ``[-mu, rho]`` the objective splits as ``f_delta + h_{-delta}``
with ``f_delta = f + delta/2 |.|^2`` and ``h_{-delta} = h - delta/2 |.|^2``.
Nothing here touches the underlying oracles beyond calling them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CompositeProblem, check_dimension


class StepSizeError(ValueError):
    """Step size outside the domain where a formula is valid."""


@dataclass(frozen=True)
class ShiftedProblem:
    base: CompositeProblem
    delta: float

    def __post_init__(self):
        mu, rho = self.base.mu, self.base.rho
        if not -mu <= self.delta <= rho:
            raise ValueError(f"delta={self.delta} outside [-mu, rho] = [{-mu}, {rho}]")

    @property
    def shifted_L(self) -> float:
        return self.base.L + self.delta

    @property
    def shifted_mu(self) -> float:
        return self.base.mu + self.delta

    @property
    def shifted_rho(self) -> float:
        return self.base.rho - self.delta


def shift(p: CompositeProblem, delta: float) -> ShiftedProblem:
    return ShiftedProblem(p, float(delta))


def shifted_smooth_value(s: ShiftedProblem, x) -> float:
    x = np.asarray(x, dtype=float)
    return float(s.base.smooth.eval(x)) + 0.5 * s.delta * float(np.dot(x, x))


def shifted_smooth_grad(s: ShiftedProblem, x) -> np.ndarray:
    """``grad f_delta(x) = grad f(x) + delta x``."""
    x = np.asarray(x, dtype=float)
    check_dimension(s.base, x)
    return s.base.smooth.grad(x) + s.delta * x


def shifted_prox(s: ShiftedProblem, gamma: float, x) -> np.ndarray:
    """Prox of ``gamma * h_{-delta}`` via the base prox.

    ``prox_{gamma h_{-delta}}(x) = prox_{g h}(x / (1 - gamma delta))`` with
    ``g = gamma / (1 - gamma delta)``. Needs ``gamma * delta < 1``; for
    ``delta <= 0`` that holds for every positive step.
    """
    if not gamma > 0:
        raise StepSizeError(f"gamma must be positive, got {gamma}")
    scale = 1.0 - gamma * s.delta
    if not scale > 0:
        raise StepSizeError(f"need gamma*delta < 1, got gamma={gamma}, delta={s.delta}")
    x = np.asarray(x, dtype=float)
    check_dimension(s.base, x)
    return s.base.nonsmooth.prox(gamma / scale, x / scale)


def forward_backward_map(s: ShiftedProblem, gamma: float, x) -> np.ndarray:
    """One forward-backward step ``prox_{gamma h_{-delta}}(x - gamma grad f_delta(x))``."""
    x = np.asarray(x, dtype=float)
    return shifted_prox(s, gamma, x - gamma * shifted_smooth_grad(s, x))


def contraction_factor(mu: float, rho: float, L: float, delta: float, gamma: float) -> float:
    """Lipschitz constant of the shifted forward-backward map at step ``gamma``.

    ``max(|1 - gamma(mu+delta)|, |1 - gamma(L+delta)|) / (1 + gamma(rho-delta))``,
    valid for ``0 < gamma < 2/(L+delta)``.
    """
    upper = 2.0 / (L + delta)
    if not 0 < gamma < upper:
        raise StepSizeError(f"gamma={gamma} outside ]0, 2/(L+delta)[ = ]0, {upper}[")
    num = max(abs(1.0 - gamma * (mu + delta)), abs(1.0 - gamma * (L + delta)))
    return num / (1.0 + gamma * (rho - delta))


def optimal_fbs_step(mu: float, rho: float, L: float, delta: float = 0.0) -> float:
    """Step ``2/(L + mu + 2 delta)`` minimizing :func:`contraction_factor`."""
    # gamma * delta = 2 delta / (L + mu + 2 delta) < 1, so the shifted prox is defined.
    return 2.0 / (L + mu + 2.0 * delta)
