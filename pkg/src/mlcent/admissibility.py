"""Admissible downweighting parameters for E_alpha(gamma*A).

Two constraints bound gamma for a given alpha: the series coefficients
gamma^r / Gamma(alpha r + 1) must decrease in r (so longer walks weigh
less), which holds for gamma <= Gamma(alpha+1); and the largest function
value E_alpha(gamma * rho) must stay below the largest machine-representable
number 10^kbar, which holds for gamma <= (kbar ln10 + ln alpha)^alpha / rho.
The admissible range is the minimum of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import MLDomainError
from .mlkernel import DEFAULT_KBAR, MLParams, gamma_fn

__all__ = [
    "LimitingBound",
    "AdmissibilityReport",
    "bound_monotone",
    "bound_representable",
    "mu",
    "mu_profile",
    "check_coeff_monotone",
    "require_admissible",
]

_LN10 = math.log(10.0)


class LimitingBound(Enum):
    MONOTONE = "monotone"
    REPRESENTABLE = "representable"


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the gamma-admissibility analysis for one alpha."""

    alpha: float
    gamma: float | None
    bound_monotone: float
    bound_representable: float
    mu: float
    admissible: bool | None
    limiting: LimitingBound


def bound_monotone(alpha: float) -> float:
    """Largest gamma with decreasing series coefficients: Gamma(alpha+1).

    Defined for 0 < alpha < 1; the endpoints are handled by the callers
    (alpha=1 continues to Gamma(2)=1, alpha=0 is spectrum-limited instead).
    """
    if not (0.0 < alpha < 1.0):
        raise MLDomainError(f"bound_monotone requires 0 < alpha < 1, got {alpha}")
    return gamma_fn(alpha + 1.0)


def bound_representable(alpha: float, rho: float, kbar: int = DEFAULT_KBAR) -> float:
    """Largest gamma keeping E_alpha(gamma*rho) below 10^kbar.

    Evaluates (kbar ln10 + ln alpha)^alpha / rho for alpha in (0, 1].
    """
    if not (0.0 < alpha <= 1.0):
        raise MLDomainError(f"bound_representable requires 0 < alpha <= 1, got {alpha}")
    if rho <= 0.0:
        raise MLDomainError(f"rho must be positive, got {rho}")
    base = kbar * _LN10 + math.log(alpha)
    if base <= 0.0:
        raise MLDomainError(
            f"kbar*ln(10) + ln(alpha) must be positive (alpha={alpha}, kbar={kbar})"
        )
    return base**alpha / rho


def mu(alpha: float, rho: float, kbar: int = DEFAULT_KBAR,
       gamma: float | None = None) -> AdmissibilityReport:
    """Combined admissible upper bound for gamma at a given alpha.

    mu(alpha) = min(Gamma(alpha+1), (kbar ln10 + ln alpha)^alpha / rho).
    The boundary gamma = mu is treated as admissible.  alpha = 1 is allowed
    (both bounds extend continuously); alpha = 0 is not, since there the
    constraint is the spectrum condition gamma < 1/rho rather than a
    coefficient bound.
    """
    if not (0.0 < alpha <= 1.0):
        raise MLDomainError(f"mu requires 0 < alpha <= 1, got {alpha}")
    b_mono = gamma_fn(alpha + 1.0)
    b_repr = bound_representable(alpha, rho, kbar)
    value = min(b_mono, b_repr)
    limiting = LimitingBound.MONOTONE if b_mono <= b_repr else LimitingBound.REPRESENTABLE
    admissible = None if gamma is None else bool(0.0 < gamma <= value)
    return AdmissibilityReport(
        alpha=alpha,
        gamma=gamma,
        bound_monotone=b_mono,
        bound_representable=b_repr,
        mu=value,
        admissible=admissible,
        limiting=limiting,
    )


def mu_profile(alphas, rho: float, kbar: int = DEFAULT_KBAR) -> list[float]:
    """mu(alpha) along a grid, with the endpoint rules applied.

    alpha = 0 uses the resolvent convergence bound 1/rho; alpha in (0, 1]
    uses mu().  Values outside [0, 1] are reported as nan.
    """
    out = []
    for a in alphas:
        if a == 0.0:
            out.append(1.0 / rho)
        elif 0.0 < a <= 1.0:
            out.append(mu(a, rho, kbar).mu)
        else:
            out.append(math.nan)
    return out


def check_coeff_monotone(alpha: float, gamma: float, r_max: int) -> bool:
    """Directly verify that gamma^r / Gamma(alpha r + 1) decreases up to r_max.

    This is the empirical counterpart of the coefficient bound: it inspects
    consecutive coefficients instead of using the closed-form threshold.
    Comparisons run in log space (ln gamma vs lgamma differences) with a
    1e-12 slack so the exact boundary gamma = Gamma(alpha+1) does not flip
    on rounding.
    """
    if r_max < 1:
        raise MLDomainError(f"r_max must be >= 1, got {r_max}")
    if gamma <= 0.0:
        raise MLDomainError(f"gamma must be positive, got {gamma}")
    log_gamma = math.log(gamma)
    for r in range(r_max):
        # c_{r+1} <= c_r  <=>  ln(gamma) <= lgamma(alpha r + alpha + 1) - lgamma(alpha r + 1)
        threshold = math.lgamma(alpha * r + alpha + 1.0) - math.lgamma(alpha * r + 1.0)
        if log_gamma > threshold + 1e-12:
            return False
    return True


def require_admissible(p: MLParams, rho: float, kbar: int = DEFAULT_KBAR) -> AdmissibilityReport:
    """Validate (alpha, gamma) against mu, returning the report.

    Raises MLDomainError for alpha = 0 with gamma*rho >= 1; for alpha in
    (0, 1] an inadmissible gamma is reported, not raised, since it only
    breaks interpretability, not computability.
    """
    if p.alpha == 0.0:
        if p.gamma * rho >= 1.0:
            raise MLDomainError(
                f"alpha=0 requires gamma*rho < 1, got {p.gamma * rho:.6g}"
            )
        return AdmissibilityReport(
            alpha=0.0,
            gamma=p.gamma,
            bound_monotone=math.inf,
            bound_representable=1.0 / rho,
            mu=1.0 / rho,
            admissible=True,
            limiting=LimitingBound.REPRESENTABLE,
        )
    if p.alpha > 1.0:
        raise MLDomainError(f"admissibility theory covers alpha in [0, 1], got {p.alpha}")
    return mu(p.alpha, rho, kbar, gamma=p.gamma)
