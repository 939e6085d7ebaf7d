"""Scalar Mittag-Leffler functions on the real line.

The two-parameter Mittag-Leffler function is the entire power series

    E_{alpha,beta}(z) = sum_{r>=0} z^r / Gamma(alpha*r + beta),

which specializes to the geometric/resolvent series (alpha=0), the
exponential (alpha=beta=1) and several other elementary closed forms.
Evaluation dispatches between a known closed form, the Taylor series with
compensated summation, and the large-argument exponential asymptotics; the
alternating series for strongly negative arguments is rescued with
arbitrary-precision arithmetic when double precision cannot reach the
requested tolerance.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum

import mpmath
from scipy.special import erfcx

from .errors import (
    GammaPoleError,
    MLConvergenceError,
    MLDomainError,
    MLOverflowError,
)

__all__ = [
    "DEFAULT_KBAR",
    "MLParams",
    "ClosedFormKind",
    "ClosedForm",
    "gamma_fn",
    "reciprocal_gamma",
    "ml_coeff",
    "closed_form_lookup",
    "eval_closed_form",
    "series_switch",
    "ml_scalar",
]

#: Decimal decades representable in IEEE double precision (largest double
#: is about 1.8e308).
DEFAULT_KBAR = 308

_LN10 = math.log(10.0)
_MAX_EXP_ARG = math.log(sys.float_info.max)  # 709.78...
_SQRT_PI = math.sqrt(math.pi)
_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class MLParams:
    """Parameter triple (alpha, beta, gamma).

    alpha scales the Gamma argument in the series coefficients, beta is the
    series offset (1 for the standard one-parameter function) and gamma is
    the walk-downweighting scale applied to matrix arguments.  gamma plays
    no role in the scalar function itself: scalar evaluation always expects
    a pre-scaled argument.
    """

    alpha: float
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.alpha >= 0.0):
            raise MLDomainError(f"alpha must be >= 0, got {self.alpha}")
        if not (self.beta > 0.0):
            raise MLDomainError(f"beta must be > 0, got {self.beta}")
        if not (self.gamma > 0.0):
            raise MLDomainError(f"gamma must be > 0, got {self.gamma}")


class ClosedFormKind(Enum):
    RESOLVENT = "resolvent"
    EXPONENTIAL = "exponential"
    ERROR_FN = "error_fn"
    COSH_SQRT = "cosh_sqrt"
    SINHC_SQRT = "sinhc_sqrt"
    QUARTER_COS_COSH = "quarter_cos_cosh"
    PHI_K = "phi_k"


@dataclass(frozen=True)
class ClosedForm:
    """One known elementary specialization of E_{alpha,beta}."""

    kind: ClosedFormKind
    k: int | None = None  # only for PHI_K (beta = k >= 2 at alpha = 1)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _gamma_half_integer(n: int) -> float:
    """Gamma(n + 1/2) as an exact sqrt(pi) rational multiple.

    n may be negative; the recurrence Gamma(x+1) = x Gamma(x) is unrolled
    from Gamma(1/2) = sqrt(pi).
    """
    value = _SQRT_PI
    if n >= 0:
        x = 0.5
        for _ in range(n):
            value *= x
            x += 1.0
    else:
        x = 0.5
        for _ in range(-n):
            x -= 1.0
            value /= x
    return value


def gamma_fn(x: float) -> float:
    """Euler Gamma function on the real line.

    Half-integer arguments are computed from the exact sqrt(pi) closed form;
    everything else goes through the C library implementation, which is
    accurate to well beyond 12 significant digits on (0, 170] and applies
    the reflection formula for negative non-integer arguments.

    Raises
    ------
    GammaPoleError
        If x is zero or a negative integer.
    MLOverflowError
        If Gamma(x) exceeds the largest representable double (x > ~171.6).
    """
    if _is_nonpositive_integer(x):
        raise GammaPoleError(f"Gamma has a pole at {x}")
    two_x = 2.0 * x
    if two_x == math.floor(two_x) and x != math.floor(x):
        return _gamma_half_integer(int(math.floor(x)))
    try:
        return math.gamma(x)
    except OverflowError as exc:
        raise MLOverflowError(f"Gamma({x}) overflows double precision") from exc


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x), defined as 0 at the poles (non-positive integers)."""
    if _is_nonpositive_integer(x):
        return 0.0
    # Snap near-pole arguments that arise from rounding of alpha*k products.
    if x < 0.5 and abs(x - round(x)) < 1e-13 and round(x) <= 0:
        return 0.0
    try:
        return 1.0 / gamma_fn(x)
    except MLOverflowError:
        return 0.0


def ml_coeff(r: int, p: MLParams) -> float:
    """Series coefficient gamma^r / Gamma(alpha*r + beta).

    Coefficients that underflow to zero are returned as 0.0; a coefficient
    that exceeds the largest double raises MLOverflowError, which signals
    an inadmissible gamma for the requested power.
    """
    if r < 0 or r != int(r):
        raise MLDomainError(f"r must be a nonnegative integer, got {r}")
    x = p.alpha * r + p.beta
    if x <= 170.0:
        try:
            num = p.gamma**r
        except OverflowError:
            num = math.inf
        if math.isfinite(num):
            return num / gamma_fn(x)
    log_c = r * math.log(p.gamma) - math.lgamma(x)
    if log_c > _MAX_EXP_ARG:
        raise MLOverflowError(
            f"coefficient gamma^r/Gamma(alpha*r+beta) overflows at r={r} "
            f"(gamma={p.gamma}, alpha={p.alpha})"
        )
    return math.exp(log_c)


_LOOKUP_TOL = 1e-12


def closed_form_lookup(alpha: float, beta: float) -> ClosedForm | None:
    """Match (alpha, beta) against the table of elementary closed forms.

    Matching is within 1e-12 on both parameters.  Returns None when no row
    matches.
    """

    def near(x, y):
        return abs(x - y) <= _LOOKUP_TOL

    if near(alpha, 0.0) and near(beta, 1.0):
        return ClosedForm(ClosedFormKind.RESOLVENT)
    if near(alpha, 1.0) and near(beta, 1.0):
        return ClosedForm(ClosedFormKind.EXPONENTIAL)
    if near(alpha, 0.5) and near(beta, 1.0):
        return ClosedForm(ClosedFormKind.ERROR_FN)
    if near(alpha, 2.0) and near(beta, 1.0):
        return ClosedForm(ClosedFormKind.COSH_SQRT)
    if near(alpha, 2.0) and near(beta, 2.0):
        return ClosedForm(ClosedFormKind.SINHC_SQRT)
    if near(alpha, 4.0) and near(beta, 1.0):
        return ClosedForm(ClosedFormKind.QUARTER_COS_COSH)
    if near(alpha, 1.0) and beta >= 2.0 - _LOOKUP_TOL:
        k = round(beta)
        if k >= 2 and near(beta, float(k)):
            return ClosedForm(ClosedFormKind.PHI_K, k=int(k))
    return None


def _exp_or_inf(x: float) -> float:
    if x > _MAX_EXP_ARG:
        return math.inf
    return math.exp(x)


def _phi_k(z: float, k: int) -> float:
    # phi_{k-1}(z) = sum_r z^r/(r+k-1)!;  the explicit form
    # z^(1-k) (e^z - sum_{r<k-1} z^r/r!) cancels catastrophically near 0,
    # so small arguments use the series directly.
    if abs(z) < 1.0:
        term = 1.0 / math.factorial(k - 1)
        total = term
        r = 1
        while True:
            term *= z / (r + k - 1)
            total += term
            if abs(term) <= 1e-18 * abs(total):
                return total
            r += 1
    partial = 0.0
    zr = 1.0
    for r in range(k - 1):
        partial += zr
        zr *= z / (r + 1)
    ez = _exp_or_inf(z)
    if not math.isfinite(ez):
        return math.inf
    return (ez - partial) / z ** (k - 1)


def eval_closed_form(form: ClosedForm, z: float) -> float:
    """Evaluate one table row at a real argument.

    Negative arguments use the trigonometric real forms of the square-root
    and quarter-root rows; the error-function row uses the scaled
    complementary error function to avoid overflow of exp(z^2).
    """
    kind = form.kind
    if kind is ClosedFormKind.RESOLVENT:
        if abs(z) >= 1.0:
            raise MLDomainError(f"resolvent series requires |z| < 1, got z={z}")
        return 1.0 / (1.0 - z)
    if kind is ClosedFormKind.EXPONENTIAL:
        return _exp_or_inf(z)
    if kind is ClosedFormKind.ERROR_FN:
        if z >= 0.0:
            ez2 = _exp_or_inf(z * z)
            if not math.isfinite(ez2):
                return math.inf
            return ez2 * (1.0 + math.erf(z))
        return float(erfcx(-z))
    if kind is ClosedFormKind.COSH_SQRT:
        if z >= 0.0:
            s = math.sqrt(z)
            return math.inf if s > _MAX_EXP_ARG else math.cosh(s)
        return math.cos(math.sqrt(-z))
    if kind is ClosedFormKind.SINHC_SQRT:
        if abs(z) < 1e-8:
            return 1.0 + z / 6.0 + z * z / 120.0
        if z > 0.0:
            s = math.sqrt(z)
            return math.inf if s > _MAX_EXP_ARG else math.sinh(s) / s
        s = math.sqrt(-z)
        return math.sin(s) / s
    if kind is ClosedFormKind.QUARTER_COS_COSH:
        if z >= 0.0:
            q = z**0.25
            if q > _MAX_EXP_ARG:
                return math.inf
            return 0.5 * (math.cos(q) + math.cosh(q))
        # principal quarter root of a negative number: E_4(-x) reduces to
        # cos(c) cosh(c) with c = (x)^(1/4)/sqrt(2)
        c = (-z) ** 0.25 / math.sqrt(2.0)
        if c > _MAX_EXP_ARG:
            return math.inf
        return math.cos(c) * math.cosh(c)
    if kind is ClosedFormKind.PHI_K:
        if form.k is None or form.k < 2:
            raise MLDomainError("PHI_K closed form requires integer k >= 2")
        return _phi_k(z, form.k)
    raise MLDomainError(f"unknown closed form {form!r}")


def series_switch(alpha: float, kbar: int = DEFAULT_KBAR) -> float:
    """Argument magnitude below which the Taylor series is preferred.

    Set to half of max(1, (kbar*ln10*alpha)^alpha); beyond it the
    exponential asymptotics are cheaper and at least as accurate.
    """
    if alpha <= 0.0:
        return 1.0
    t = (kbar * _LN10 * alpha) ** alpha
    return max(1.0, t) / 2.0


def _series_double(z: float, alpha: float, beta: float, tol: float):
    """Kahan-compensated Taylor sum.

    Returns (value, relative error estimate).  The estimate combines the
    rounding bound eps * sum|terms| / |sum| with the last truncated term,
    which makes the catastrophic cancellation of strongly negative
    arguments detectable by the caller.
    """
    total = 0.0
    comp = 0.0
    abs_sum = 0.0
    max_log = 0.0
    log_abs_z = math.log(abs(z)) if z != 0.0 else -math.inf
    sign_flip = z < 0.0
    prev_abs = math.inf
    small_count = 0
    r = 0
    while r <= 100000:
        log_term = r * log_abs_z - math.lgamma(alpha * r + beta)
        if log_term > _MAX_EXP_ARG:
            # series magnitudes overflow double precision
            return (math.inf if not sign_flip else math.nan), math.inf
        max_log = max(max_log, abs(log_term))
        term = math.exp(log_term)
        if sign_flip and (r % 2 == 1):
            term = -term
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_term = abs(term)
        abs_sum += abs_term
        if r >= 2 and abs_term <= prev_abs:
            scale = max(abs(total), sys.float_info.min)
            if abs_term <= 0.125 * tol * scale:
                small_count += 1
                if small_count >= 2:
                    break
            else:
                small_count = 0
        prev_abs = abs_term
        r += 1
    else:
        raise MLConvergenceError(
            f"Taylor series for E_({alpha},{beta}) did not settle at z={z}"
        )
    if total == 0.0:
        return 0.0, math.inf
    # each term carries ~(1 + |log term|) ulps from the exp/lgamma route
    err = (_EPS * (2.0 + max_log) * abs_sum + 4.0 * prev_abs) / abs(total)
    return total, err


def _asymptotic_pos(z: float, alpha: float, beta: float, p_terms: int = 4):
    """Leading exponential asymptotics for large positive real arguments.

    E_{alpha,beta}(z) ~ (1/alpha) z^((1-beta)/alpha) exp(z^(1/alpha))
                        - sum_{k=1..p} z^(-k) / Gamma(beta - alpha k)

    Returns (value, relative error estimate), with the estimate taken from
    the first omitted correction term.  Valid for 0 < alpha < 2.
    """
    exponent = z ** (1.0 / alpha)
    log_lead = exponent + ((1.0 - beta) / alpha) * math.log(z) - math.log(alpha)
    if log_lead > _MAX_EXP_ARG:
        return math.inf, 0.0
    lead = math.exp(log_lead)
    corr = 0.0
    for k in range(1, p_terms + 1):
        corr += z ** (-k) * reciprocal_gamma(beta - alpha * k)
    value = lead - corr
    omitted = abs(z ** (-(p_terms + 1)) * reciprocal_gamma(beta - alpha * (p_terms + 1)))
    if omitted == 0.0:
        omitted = abs(z) ** (-(p_terms + 1))
    if value == 0.0:
        return value, math.inf
    return value, omitted / abs(value)


def ml_scalar(z: float, p: MLParams, tol: float = 1e-12, method: str = "auto") -> float:
    """Evaluate E_{alpha,beta}(z) for real z to relative tolerance tol.

    Dispatch order for method="auto": an exact closed form when (alpha,
    beta) matches a table row, the Taylor series for |z| below the switch
    point, and the exponential asymptotics beyond it.  Whenever the chosen
    branch cannot certify the requested tolerance the other branch (or an
    arbitrary-precision rerun of the series) is tried before giving up.
    A genuinely overflowing value is returned as +inf rather than raised.

    Parameters
    ----------
    z : float
        Real argument (already scaled; p.gamma is not applied here).
    p : MLParams
        alpha >= 0 and beta > 0 select the function family.
    tol : float
        Requested relative accuracy.
    method : str
        "auto", "closed", "series" or "asymptotic".

    Raises
    ------
    MLDomainError
        alpha = 0 with |z| >= 1 (the resolvent series diverges).
    MLConvergenceError
        No branch can certify tol for a finite value.
    """
    if tol <= 0.0:
        raise MLDomainError(f"tol must be positive, got {tol}")
    alpha, beta = p.alpha, p.beta
    if z == 0.0:
        return 1.0 / gamma_fn(beta)
    if alpha == 0.0:
        # E_{0,beta}(z) = 1/(Gamma(beta) (1-z)) on |z| < 1
        if abs(z) >= 1.0:
            raise MLDomainError(f"alpha=0 requires |z| < 1, got z={z}")
        if method == "asymptotic":
            raise MLDomainError("no asymptotic branch at alpha=0")
        return 1.0 / (gamma_fn(beta) * (1.0 - z))

    form = closed_form_lookup(alpha, beta)
    if method == "closed":
        if form is None:
            raise MLDomainError(f"no closed form for alpha={alpha}, beta={beta}")
        return eval_closed_form(form, z)
    if method == "auto" and form is not None:
        return eval_closed_form(form, z)

    if method == "asymptotic":
        if z <= 0.0 or not (0.0 < alpha < 2.0):
            raise MLDomainError(
                "asymptotic branch requires z > 0 and 0 < alpha < 2"
            )
        value, err = _asymptotic_pos(z, alpha, beta)
        if math.isinf(value) or err <= tol:
            return value
        raise MLConvergenceError(
            f"asymptotics reach relative error {err:.2e} > tol at z={z}"
        )

    zs = series_switch(alpha)
    use_series_first = abs(z) <= zs or not (0.0 < alpha < 2.0) or z < 0.0

    if not use_series_first and method != "series":
        value, err = _asymptotic_pos(z, alpha, beta)
        if math.isinf(value) or err <= tol:
            return value

    value, err = _series_double(z, alpha, beta, tol)
    if math.isinf(value):
        return value
    if math.isfinite(value) and err <= tol:
        return value

    if method != "series" and z > 0.0 and 0.0 < alpha < 2.0 and abs(z) > zs:
        # series could not certify; asymptotics may still be exact enough
        a_value, a_err = _asymptotic_pos(z, alpha, beta)
        if math.isinf(a_value) or a_err <= tol:
            return a_value

    # arbitrary-precision rescue of the ill-conditioned alternating series
    digits_lost = int(abs(z) ** (1.0 / alpha) / _LN10) + 10
    if digits_lost <= 2000:
        return _series_mp(z, alpha, beta, tol, digits_lost)
    raise MLConvergenceError(
        f"E_({alpha},{beta})({z}) needs more than 2000 digits of headroom"
    )


def _series_mp(z: float, alpha: float, beta: float, tol: float, extra_digits: int) -> float:
    dps = min(30 + extra_digits, 3000)
    with mpmath.workdps(dps):
        mz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        stop = mpmath.mpf(10) ** (-(dps - 8))
        prev_abs = mpmath.inf
        small_count = 0
        r = 0
        while r <= 200000:
            term = mz**r / mpmath.gamma(alpha * r + beta)
            total += term
            abs_term = abs(term)
            if r >= 2 and abs_term <= prev_abs:
                if abs_term <= stop * max(abs(total), mpmath.mpf(1e-300)):
                    small_count += 1
                    if small_count >= 2:
                        break
                else:
                    small_count = 0
            prev_abs = abs_term
            r += 1
        else:
            raise MLConvergenceError(
                f"high-precision series did not settle for z={z}"
            )
        result = float(total)
    return result
