"""
Zero-and-one inflated unit-Lindley distribution ULINF(alpha, p, theta)

Mass alpha(1-p) at 0, alpha p at 1 and (1-alpha) UL(theta) on (0, 1).
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ulinf.errors import DomainError
from ulinf.models import (
    DensityTable,
    PointKind,
    QuadratureSpec,
    SamplingMode,
    UlinfParams,
    UlinfPoint,
    UnitLindleyParams,
)
from ulinf.unit_lindley import ArrayLike, ul_cdf, ul_moment, ul_pdf, ul_quantile, ul_sample

logger = logging.getLogger(__name__)


def ulinf_density(point: Union[UlinfPoint, float], params: UlinfParams) -> float:
    """Density with respect to counting measure at {0, 1} plus Lebesgue measure inside.

    Plain numbers are classified first, exact 0.0 and 1.0 being endpoints.
    """
    point = UlinfPoint.of(point)
    if point.kind is PointKind.AT_ZERO:
        return params.alpha * (1.0 - params.p)
    if point.kind is PointKind.AT_ONE:
        return params.alpha * params.p
    return (1.0 - params.alpha) * ul_pdf(point.y, params.unit_lindley)


def ulinf_cdf(y: ArrayLike, params: UlinfParams) -> ArrayLike:
    """Right-continuous CDF with jumps alpha(1-p) at 0 and alpha p at 1"""
    arr = np.asarray(y, dtype=float)
    continuous = ul_cdf(arr, params.unit_lindley)
    body = params.alpha * (1.0 - params.p) + (1.0 - params.alpha) * continuous
    out = np.where(arr < 0.0, 0.0, np.where(arr >= 1.0, 1.0, body))
    return float(out) if np.ndim(y) == 0 else out


def ulinf_quantile(u: float, params: UlinfParams) -> float:
    """Generalized inverse of ulinf_cdf"""
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"quantile level must lie in [0, 1], got {u!r}")
    mass_zero = params.alpha * (1.0 - params.p)
    if u <= mass_zero:
        return 0.0
    if u > 1.0 - params.alpha * params.p:
        return 1.0
    level = (u - mass_zero) / (1.0 - params.alpha)
    return ul_quantile(min(max(level, 1e-300), 1.0 - 1e-16), params.unit_lindley)


def ulinf_moment(r: int, params: UlinfParams, spec: Optional[QuadratureSpec] = None) -> float:
    """E(Y^r) = alpha p + (1 - alpha) mu_r"""
    if params.alpha == 1.0:
        if r < 1 or int(r) != r:
            raise DomainError(f"moment order must be a positive integer, got {r!r}")
        return params.p
    return params.alpha * params.p + (1.0 - params.alpha) * ul_moment(r, params.unit_lindley, spec)


def ulinf_mean_variance(params: UlinfParams) -> Tuple[float, float]:
    """Mean alpha p + (1-alpha)/(1+theta) and variance E(Y^2) - mean^2"""
    mean = params.alpha * params.p + (1.0 - params.alpha) / (1.0 + params.theta)
    second = ulinf_moment(2, params)
    return mean, max(second - mean * mean, 0.0)


def stratified_endpoint_count(n: int, alpha: float) -> int:
    """round(alpha n), halves rounded up, so endpoint and interior counts sum to n"""
    return min(n, int(math.floor(alpha * n + 0.5)))


def ulinf_sample(
    n: int,
    params: UlinfParams,
    rng: np.random.Generator,
    mode: SamplingMode = SamplingMode.MIXTURE,
) -> np.ndarray:
    """Draw n observations; endpoints are exact 0.0 and 1.0.

    MIXTURE draws the component of every observation independently.
    STRATIFIED fixes round(alpha n) Bernoulli(p) endpoint draws, fills the rest
    with unit-Lindley draws and shuffles.
    """
    if n < 0:
        raise DomainError(f"sample size must be non-negative, got {n}")
    if n == 0:
        return np.empty(0)

    if mode is SamplingMode.MIXTURE:
        discrete = rng.random(n) < params.alpha
        ones = rng.random(n) < params.p
        continuous = ul_sample(n, params.unit_lindley, rng)
        return np.where(discrete, ones.astype(float), continuous)

    n_endpoints = stratified_endpoint_count(n, params.alpha)
    endpoints = (rng.random(n_endpoints) < params.p).astype(float)
    interior = ul_sample(n - n_endpoints, params.unit_lindley, rng)
    values = np.concatenate([endpoints, interior])
    rng.shuffle(values)
    return values


def density_table(
    alpha: float,
    p: float,
    thetas: Sequence[float],
    grid_size: int = 99,
) -> DensityTable:
    """Interior density on an open uniform grid for several theta values"""
    if grid_size < 1:
        raise DomainError(f"grid size must be positive, got {grid_size}")
    y = np.arange(1, grid_size + 1) / (grid_size + 1.0)
    columns: List[List[float]] = []
    for theta in thetas:
        params = UnitLindleyParams(theta=theta)
        columns.append(list((1.0 - alpha) * np.asarray(ul_pdf(y, params))))
    rows = [list(row) for row in zip(*columns)] if columns else [[] for _ in y]
    return DensityTable(
        alpha=alpha,
        p=p,
        thetas=list(thetas),
        y=list(y),
        densities=rows,
        mass_at_zero=alpha * (1.0 - p),
        mass_at_one=alpha * p,
    )
