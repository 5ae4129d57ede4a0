"""Closed-form rates, inertia parameters and the FBS/FISTA comparison.

Conventions: ``T = sqrt(L^2 + mu rho)`` and ``S = sqrt(mu (L + rho))``.
FISTA with step ``1/L`` and inertia ``(T - S)/(T + S)`` contracts its
Lyapunov energy by ``1 - S/T`` per iteration. The coupling ``c = S/(S+T)``
links the two-sequence and three-sequence forms (``z = x + (y - x)/c``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Algorithm

TIE_TOL = 1e-12


class DomainError(ValueError):
    """Constants outside the region where a formula is defined."""


def _check(mu: float, rho: float, L: float) -> None:
    if not L > 0:
        raise DomainError(f"L must be positive, got {L}")
    if not 0 <= mu < L:
        raise DomainError(f"need 0 <= mu < L, got mu={mu}, L={L}")
    if not rho >= 0:
        raise DomainError(f"rho must be nonnegative, got {rho}")


def _ST(mu, rho, L):
    return math.sqrt(mu * (L + rho)), math.sqrt(L * L + mu * rho)


def fista_rate(mu: float, rho: float, L: float) -> float:
    """``1 - sqrt(mu (L + rho) / (L^2 + mu rho))``; 1.0 when ``mu == 0``."""
    _check(mu, rho, L)
    S, T = _ST(mu, rho, L)
    return 1.0 - S / T


def fista_inertia(mu: float, rho: float, L: float) -> float:
    _check(mu, rho, L)
    S, T = _ST(mu, rho, L)
    return (T - S) / (T + S)


def fista_coupling(mu: float, rho: float, L: float) -> float:
    """``c = S/(S + T)``; equals ``(1 - alpha)/2`` and never exceeds 1/2."""
    _check(mu, rho, L)
    S, T = _ST(mu, rho, L)
    return S / (S + T)


def lyapunov_weight(mu: float, rho: float, L: float) -> float:
    """Weight of ``|z - x*|^2`` in the Lyapunov energy: ``mu (L+rho)^2 / (2 (L^2 + mu rho))``."""
    return mu * (L + rho) ** 2 / (2.0 * (L * L + mu * rho))


def fbs_rate(mu: float, rho: float, L: float) -> float:
    """Energy contraction ``(L - mu)/(L + mu + 2 rho)`` of FBS at step ``2/(L+mu)``."""
    _check(mu, rho, L)
    return (L - mu) / (L + mu + 2.0 * rho)


def fbs_rate_remark(mu: float, rho: float) -> float:
    """The normalized (``L = 1``) FBS rate ``(1 - mu)/(1 + mu + rho)``.

    This is the expression used in the FBS versus FISTA-rho comparison
    (:func:`zeta`). It differs from ``fbs_rate(mu, rho, 1)``, whose
    denominator carries ``2 rho``; both are kept as published.
    """
    if not 0 <= mu <= 1 or rho < 0:
        raise DomainError(f"need mu in [0, 1], rho >= 0, got mu={mu}, rho={rho}")
    return (1.0 - mu) / (1.0 + mu + rho)


def fista_rho_rate(mu: float, rho: float, L: float = 1.0) -> float:
    """Optimal shifted FISTA rate ``1 - sqrt((mu + rho)/(L + rho))``."""
    _check(mu, rho, L)
    return 1.0 - math.sqrt((mu + rho) / (L + rho))


@dataclass(frozen=True)
class RateCertificate:
    algorithm: Algorithm
    mu: float
    rho: float
    L: float
    delta: float
    contraction: float
    inertia_alpha: float
    step_gamma: float
    coupling_c: float
    z_coefficient: float  # 1/c, inf when degenerate
    lyapunov_weight: float
    degenerate: bool
    formula: str

    @property
    def shifted(self) -> tuple:
        """``(mu + delta, rho - delta, L + delta)``."""
        return (self.mu + self.delta, self.rho - self.delta, self.L + self.delta)


def fista_delta_certificate(mu: float, rho: float, L: float, delta: float = 0.0) -> RateCertificate:
    """Certificate of FISTA run with step ``1/L`` and the ``delta``-shifted inertia.

    The rate is ``fista_rate(mu + delta, rho - delta, L + delta)``, strictly
    decreasing in ``delta`` and smallest at ``delta = rho``.
    """
    _check(mu, rho, L)
    if not -mu <= delta <= rho:
        raise DomainError(f"delta={delta} outside [-mu, rho] = [{-mu}, {rho}]")
    m, r, l = mu + delta, rho - delta, L + delta
    # Clamp rounding from delta = -mu.
    m = max(m, 0.0)
    r = max(r, 0.0)
    S, T = math.sqrt(m * (L + rho)), math.sqrt(l * l + m * r)
    degenerate = S == 0.0
    return RateCertificate(
        algorithm=Algorithm.FISTA_DELTA,
        mu=mu, rho=rho, L=L, delta=delta,
        contraction=1.0 - S / T,
        inertia_alpha=(T - S) / (T + S),
        step_gamma=1.0 / L,
        coupling_c=S / (S + T),
        z_coefficient=math.inf if degenerate else (S + T) / S,
        lyapunov_weight=lyapunov_weight(m, r, l),
        degenerate=degenerate,
        formula="1 - sqrt((mu+d)(L+rho) / ((L+d)^2 + (mu+d)(rho-d)))",
    )


def fbs_certificate(mu: float, rho: float, L: float) -> RateCertificate:
    rate = fbs_rate(mu, rho, L)
    return RateCertificate(
        algorithm=Algorithm.FBS, mu=mu, rho=rho, L=L, delta=0.0,
        contraction=rate, inertia_alpha=0.0, step_gamma=2.0 / (L + mu),
        coupling_c=math.nan, z_coefficient=math.nan,
        lyapunov_weight=0.5 * (mu + rho), degenerate=(mu == 0 and rho == 0),
        formula="(L-mu) / (L+mu+2 rho)",
    )


def zeta(mu: float, rho: float) -> float:
    """Sign test for ``fbs_rate_remark(mu, rho) > fista_rho_rate(mu, rho)``.

    ``(mu + rho)(1 + mu + rho)^2 - (1 + rho)(2 mu + rho)^2``; positive exactly
    when the normalized FBS rate is worse than the optimally shifted FISTA rate.
    """
    return (mu + rho) * (1.0 + mu + rho) ** 2 - (1.0 + rho) * (2.0 * mu + rho) ** 2


class Region(str, enum.Enum):
    FBS_BETTER = "FBS"
    FISTA0_BETTER = "FISTA0"
    TIE = "TIE"


def normalized_rates(mu: float, rho: float, remark_fbs: bool = False) -> tuple:
    """``(r_fbs, r_fista0)`` at ``L = 1``.

    ``remark_fbs`` swaps the FBS rate for :func:`fbs_rate_remark`.
    """
    # mu == 1 is the limit point where both rates vanish; evaluate the raw formulas.
    r_fbs = (1.0 - mu) / (1.0 + mu + (1.0 if remark_fbs else 2.0) * rho)
    r_fista = 1.0 - math.sqrt(mu * (1.0 + rho) / (1.0 + mu * rho))
    return r_fbs, r_fista


def classify(mu: float, rho: float, tol: float = TIE_TOL, remark_fbs: bool = False) -> Region:
    r_fbs, r_fista = normalized_rates(mu, rho, remark_fbs)
    if abs(r_fbs - r_fista) <= tol:
        return Region.TIE
    return Region.FBS_BETTER if r_fbs < r_fista else Region.FISTA0_BETTER


def region_map(mu_grid, rho_grid, tol: float = TIE_TOL, remark_fbs: bool = False) -> np.ndarray:
    """Winner of FBS versus unshifted FISTA (``L = 1``) on a ``mu x rho`` grid.

    Returns an object array indexed ``[i_mu, j_rho]`` of :class:`Region`.
    FBS is rated by ``fbs_rate(mu, rho, 1)`` unless ``remark_fbs`` is set.
    """
    mu_grid = np.asarray(mu_grid, dtype=float)
    rho_grid = np.asarray(rho_grid, dtype=float)
    if mu_grid.min() < 0 or mu_grid.max() > 1 or rho_grid.min() < 0:
        raise DomainError("mu grid must lie in [0, 1] and rho grid in [0, inf)")
    out = np.empty((mu_grid.size, rho_grid.size), dtype=object)
    for i, mu in enumerate(mu_grid):
        for j, rho in enumerate(rho_grid):
            out[i, j] = classify(float(mu), float(rho), tol, remark_fbs)
    return out
