"""
Unit-Lindley distribution UL(theta) on (0, 1)
Y = X / (1 + X) with X ~ Lindley(theta)
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from ulinf.errors import DomainError
from ulinf.models import QuadratureSpec, UnitLindleyParams
from ulinf.special_fn import exp_integral_e1_scaled, integrate

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Above this theta the closed-form second moment loses digits to cancellation
_MU2_CLOSED_FORM_MAX_THETA = 100.0
_SMALLEST = np.finfo(float).tiny
_LARGEST_BELOW_ONE = np.nextafter(1.0, 0.0)


def _as_output(values: np.ndarray, like) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def ul_logpdf(y: ArrayLike, params: UnitLindleyParams) -> ArrayLike:
    """Log-density 2 ln(theta) - ln(1+theta) - 3 ln(1-y) - theta y/(1-y)"""
    arr = np.asarray(y, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("unit-Lindley density is defined for 0 < y < 1 only")
    theta = params.theta
    with np.errstate(over="ignore", divide="ignore"):
        out = (
            2.0 * math.log(theta)
            - math.log1p(theta)
            - 3.0 * np.log1p(-arr)
            - theta * arr / (1.0 - arr)
        )
    return _as_output(out, y)


def ul_pdf(y: ArrayLike, params: UnitLindleyParams) -> ArrayLike:
    """Density theta^2/(1+theta) (1-y)^-3 exp(-theta y/(1-y)), evaluated in log space"""
    out = np.exp(np.asarray(ul_logpdf(y, params), dtype=float))
    return _as_output(out, y)


def ul_cdf(y: ArrayLike, params: UnitLindleyParams) -> ArrayLike:
    """CDF 1 - (1 + theta y/((1+theta)(1-y))) exp(-theta y/(1-y)), clamped to 0 and 1 outside (0, 1)"""
    arr = np.asarray(y, dtype=float)
    theta = params.theta
    inside = (arr > 0.0) & (arr < 1.0)
    yi = np.where(inside, arr, 0.5)
    z = theta * yi / (1.0 - yi)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        body = -np.expm1(-z) - (z / (1.0 + theta)) * np.exp(-z)
    body = np.where(np.isfinite(body), body, 1.0)
    out = np.where(inside, np.clip(body, 0.0, 1.0), np.where(arr >= 1.0, 1.0, 0.0))
    return _as_output(out, y)


def ul_quantile(u: float, params: UnitLindleyParams) -> float:
    """The y in (0, 1) with ul_cdf(y) = u, by Brent's bracketed root finder"""
    u = float(u)
    if not 0.0 < u < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {u!r}")
    root = brentq(
        lambda y: ul_cdf(y, params) - u,
        0.0,
        1.0,
        xtol=1e-16,
        rtol=4.0 * np.finfo(float).eps,
        maxiter=500,
    )
    return float(min(max(root, _SMALLEST), _LARGEST_BELOW_ONE))


def lindley_sample(n: int, theta: float, rng: np.random.Generator) -> np.ndarray:
    """Lindley(theta) draws by composition.

    With probability theta/(1+theta) an Exponential(theta) variate, otherwise
    the sum of two Exponential(theta) variates, i.e. Gamma(2, theta).
    """
    scale = 1.0 / theta
    from_exponential = rng.random(n) < theta / (1.0 + theta)
    first = rng.exponential(scale, n)
    second = rng.exponential(scale, n)
    return first + np.where(from_exponential, 0.0, second)


def ul_sample(n: int, params: UnitLindleyParams, rng: np.random.Generator) -> np.ndarray:
    """n unit-Lindley draws, all strictly inside (0, 1)"""
    if n < 0:
        raise DomainError(f"sample size must be non-negative, got {n}")
    if n == 0:
        return np.empty(0)
    x = lindley_sample(n, params.theta, rng)
    y = x / (1.0 + x)
    # an exact 0.0 or 1.0 would be read back as an endpoint observation
    return np.clip(y, _SMALLEST, _LARGEST_BELOW_ONE)


def ul_moment_closed_form(r: int, params: UnitLindleyParams) -> Optional[float]:
    """Closed forms for r = 1 and r = 2, None otherwise.

    mu1 = 1/(1+theta)
    mu2 = (theta^2 e^theta E1(theta) - theta + 1)/(1+theta)
    """
    theta = params.theta
    if r == 1:
        return 1.0 / (1.0 + theta)
    if r == 2:
        return (theta * theta * exp_integral_e1_scaled(theta) - theta + 1.0) / (1.0 + theta)
    return None


def ul_moment_quadrature(r: int, params: UnitLindleyParams, spec: Optional[QuadratureSpec] = None) -> float:
    """mu_r by quadrature over the parent Lindley variable.

    With s = theta x the integrand theta/(1+theta) (1 + s/theta) e^-s (s/(theta+s))^r
    stays well scaled for every theta.
    """
    theta = params.theta
    weight = theta / (1.0 + theta)

    def integrand(s: float) -> float:
        return weight * (1.0 + s / theta) * math.exp(-s) * (s / (theta + s)) ** r

    return integrate(integrand, 0.0, math.inf, spec)


def ul_moment(r: int, params: UnitLindleyParams, spec: Optional[QuadratureSpec] = None) -> float:
    """r-th raw moment of UL(theta)"""
    if r < 1 or int(r) != r:
        raise DomainError(f"moment order must be a positive integer, got {r!r}")
    r = int(r)
    if r == 1 or (r == 2 and params.theta <= _MU2_CLOSED_FORM_MAX_THETA):
        return ul_moment_closed_form(r, params)
    return ul_moment_quadrature(r, params, spec)
