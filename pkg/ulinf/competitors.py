"""
Competitor models: zero-and-one inflated beta (BEINF) and Kumaraswamy (ZOIK)

Both share the ULINF discrete part, so their mixing and Bernoulli estimates
are T1/n and T2/T1. Only the continuous shape parameters need iterative fitting.
"""

import logging
import math
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import betainc, betaln, digamma, polygamma, xlogy

from ulinf import config
from ulinf.errors import InsufficientDataError, OptimizationError
from ulinf.inference import loglik_alpha, loglik_p, normal_quantile
from ulinf.models import (
    BeinfParams,
    FitResult,
    ModelName,
    OptimSettings,
    PartitionedSample,
    PointKind,
    UlinfPoint,
    ZoikParams,
)
from ulinf.optimizer import fd_hessian, maximize_1d, nelder_mead
from ulinf.unit_lindley import ArrayLike

logger = logging.getLogger(__name__)

_SCORE_TOL = 1e-10
_PROFILE_LOG_A_BOUNDS = (math.log(1e-3), math.log(1e3))
_BOUNDARY_SLACK = 1e-6


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def _discrete_logpdf(kind: PointKind, weight: float, one_prob: float) -> float:
    if kind is PointKind.AT_ZERO:
        return _log(weight * (1.0 - one_prob))
    return _log(weight * one_prob)


def _interior(sample: PartitionedSample, model: str) -> np.ndarray:
    if sample.n_interior < 2:
        raise InsufficientDataError(
            f"{model} needs at least 2 interior observations, got {sample.n_interior}"
        )
    return np.asarray(sample.interior, dtype=float)


# ---------------------------------------------------------------------------
# Inflated beta
# ---------------------------------------------------------------------------

def beinf_logpdf(point: Union[UlinfPoint, float], params: BeinfParams) -> float:
    """ln of alpha(1-gamma) at 0, alpha gamma at 1, (1-alpha) Beta(a, b) inside"""
    point = UlinfPoint.of(point)
    if point.kind is not PointKind.INTERIOR:
        return _discrete_logpdf(point.kind, params.alpha, params.gamma)
    y = point.y
    return (
        _log(1.0 - params.alpha)
        + (params.a - 1.0) * math.log(y)
        + (params.b - 1.0) * math.log1p(-y)
        - float(betaln(params.a, params.b))
    )


def beinf_cdf(y: ArrayLike, params: BeinfParams) -> ArrayLike:
    arr = np.asarray(y, dtype=float)
    body = params.alpha * (1.0 - params.gamma) + (1.0 - params.alpha) * betainc(
        params.a, params.b, np.clip(arr, 0.0, 1.0)
    )
    out = np.where(arr < 0.0, 0.0, np.where(arr >= 1.0, 1.0, body))
    return float(out) if np.ndim(y) == 0 else out


def beta_interior_loglik(a: float, b: float, interior: np.ndarray) -> float:
    """Beta(a, b) log-likelihood of the interior values"""
    if a <= 0.0 or b <= 0.0:
        return -math.inf
    return float(
        (a - 1.0) * np.sum(np.log(interior))
        + (b - 1.0) * np.sum(np.log1p(-interior))
        - interior.size * betaln(a, b)
    )


def _beta_moment_start(interior: np.ndarray) -> Tuple[float, float]:
    mean = float(np.mean(interior))
    var = float(np.var(interior))
    if var > 0.0:
        common = mean * (1.0 - mean) / var - 1.0
        if common > 0.0:
            return mean * common, (1.0 - mean) * common
    return 1.0, 1.0


def _beta_newton(interior: np.ndarray, settings: OptimSettings) -> Optional[Tuple[float, float]]:
    """Newton iteration on the digamma score equations, None when it stalls"""
    nc = interior.size
    s1 = float(np.sum(np.log(interior)))
    s2 = float(np.sum(np.log1p(-interior)))
    a, b = _beta_moment_start(interior)
    ll = beta_interior_loglik(a, b, interior)
    tol = _SCORE_TOL * max(1.0, nc)

    for iteration in range(settings.max_iter):
        psi_ab = digamma(a + b)
        score = np.array([s1 - nc * (digamma(a) - psi_ab), s2 - nc * (digamma(b) - psi_ab)])
        if np.linalg.norm(score) < tol:
            logger.debug("beta Newton converged after %d iterations", iteration)
            return a, b
        tri_ab = polygamma(1, a + b)
        hessian = -nc * np.array([
            [polygamma(1, a) - tri_ab, -tri_ab],
            [-tri_ab, polygamma(1, b) - tri_ab],
        ])
        try:
            step = np.linalg.solve(hessian, -score)
        except np.linalg.LinAlgError:
            return None

        # halve until the step stays positive and does not lower the likelihood
        scale = 1.0
        while scale > 1e-12:
            a_new, b_new = a + scale * step[0], b + scale * step[1]
            if a_new > 0.0 and b_new > 0.0:
                ll_new = beta_interior_loglik(a_new, b_new, interior)
                if ll_new >= ll - 1e-12 * abs(ll):
                    break
            scale *= 0.5
        else:
            return None
        a, b, ll = a_new, b_new, ll_new
    return None


def _fit_beta_shapes(interior: np.ndarray, settings: OptimSettings) -> Tuple[float, float, bool]:
    """(a, b, used_fallback)"""
    shapes = _beta_newton(interior, settings)
    if shapes is not None:
        return shapes[0], shapes[1], False

    logger.debug("beta Newton stalled, falling back to Nelder-Mead on log shapes")
    start = np.log(_beta_moment_start(interior))
    try:
        best, _ = nelder_mead(
            lambda u: beta_interior_loglik(math.exp(u[0]), math.exp(u[1]), interior),
            start,
            settings,
        )
    except OptimizationError as exc:
        raise OptimizationError(
            f"beta shape fit failed: {exc}", best_x=exc.best_x, best_value=exc.best_value, trace=exc.trace
        ) from exc
    return math.exp(best[0]), math.exp(best[1]), True


# ---------------------------------------------------------------------------
# Inflated Kumaraswamy
# ---------------------------------------------------------------------------

def zoik_logpdf(point: Union[UlinfPoint, float], params: ZoikParams) -> float:
    """ln of lambda(1-p) at 0, lambda p at 1, (1-lambda) a b y^(a-1) (1-y^a)^(b-1) inside"""
    point = UlinfPoint.of(point)
    if point.kind is not PointKind.INTERIOR:
        return _discrete_logpdf(point.kind, params.lam, params.p)
    y = point.y
    return (
        _log(1.0 - params.lam)
        + math.log(params.a)
        + math.log(params.b)
        + (params.a - 1.0) * math.log(y)
        + float(xlogy(params.b - 1.0, -math.expm1(params.a * math.log(y))))
    )


def kumaraswamy_cdf(y: ArrayLike, a: float, b: float) -> ArrayLike:
    """1 - (1 - y^a)^b on [0, 1]"""
    arr = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        out = -np.expm1(b * np.log1p(-(arr ** a)))
    return float(out) if np.ndim(y) == 0 else out


def zoik_cdf(y: ArrayLike, params: ZoikParams) -> ArrayLike:
    arr = np.asarray(y, dtype=float)
    body = params.lam * (1.0 - params.p) + (1.0 - params.lam) * kumaraswamy_cdf(arr, params.a, params.b)
    out = np.where(arr < 0.0, 0.0, np.where(arr >= 1.0, 1.0, body))
    return float(out) if np.ndim(y) == 0 else out


def kumaraswamy_interior_loglik(a: float, b: float, interior: np.ndarray) -> float:
    """Kumaraswamy(a, b) log-likelihood of the interior values"""
    if a <= 0.0 or b <= 0.0:
        return -math.inf
    log_tail = np.log1p(-np.exp(a * np.log(interior)))
    return float(
        interior.size * (math.log(a) + math.log(b))
        + (a - 1.0) * np.sum(np.log(interior))
        + (b - 1.0) * np.sum(log_tail)
    )


def kumaraswamy_profile_b(a: float, interior: np.ndarray) -> float:
    """b maximizing the likelihood for fixed a: -nc / sum ln(1 - y^a)"""
    tail = float(np.sum(np.log1p(-np.exp(a * np.log(interior)))))
    return -interior.size / tail if tail < 0.0 else math.inf


def _kumaraswamy_profile(log_a: float, interior: np.ndarray) -> float:
    a = math.exp(log_a)
    b = kumaraswamy_profile_b(a, interior)
    if not math.isfinite(b):
        return -math.inf
    return kumaraswamy_interior_loglik(a, b, interior)


# ---------------------------------------------------------------------------
# Shared result assembly
# ---------------------------------------------------------------------------

def _shape_errors(loglik_fn, a: float, b: float) -> Tuple[Optional[float], Optional[float]]:
    """Standard errors from the finite-difference observed information"""
    try:
        hessian = fd_hessian(lambda x: loglik_fn(x[0], x[1]), (a, b))
        covariance = np.linalg.inv(-hessian)
    except (OptimizationError, np.linalg.LinAlgError) as exc:
        logger.debug("observed information unavailable: %s", exc)
        return None, None
    variances = np.diag(covariance)
    if np.any(variances <= 0.0) or not np.all(np.isfinite(variances)):
        return None, None
    return float(math.sqrt(variances[0])), float(math.sqrt(variances[1]))


def _assemble(
    model: ModelName,
    sample: PartitionedSample,
    names: Tuple[str, str, str, str],
    weight: float,
    one_prob: float,
    a: float,
    b: float,
    interior_ll: float,
    shape_se: Tuple[Optional[float], Optional[float]],
    level: float,
    derived: Dict[str, float],
    flags: list,
) -> FitResult:
    z = normal_quantile(level)
    estimates = dict(zip(names, (weight, one_prob, a, b)))
    ses: Dict[str, Optional[float]] = {}

    # discrete part: same closed-form errors as ULINF
    ses[names[0]] = math.sqrt(weight * (1.0 - weight) / sample.n) if 0.0 < weight < 1.0 else None
    ses[names[1]] = (
        math.sqrt(one_prob * (1.0 - one_prob) / (sample.n * weight)) if 0.0 < one_prob < 1.0 else None
    )
    ses[names[2]], ses[names[3]] = shape_se

    intervals: Dict[str, Optional[Tuple[float, float]]] = {}
    for i, name in enumerate(names):
        se = ses[name]
        if se is None:
            intervals[name] = None
            if i < 2:
                flags.append(f"{name}_on_boundary_no_interval")
            continue
        lo, hi = estimates[name] - z * se, estimates[name] + z * se
        intervals[name] = (max(lo, 0.0), min(hi, 1.0)) if i < 2 else (max(lo, np.nextafter(0.0, 1.0)), hi)

    ll = loglik_alpha(weight, sample) + loglik_p(one_prob, sample) + interior_ll
    return FitResult.build(
        model,
        loglik=ll,
        n=sample.n,
        estimates=estimates,
        std_errors=ses,
        conf_intervals=intervals,
        level=level,
        derived=derived,
        flags=flags,
    )


def _discrete_estimates(sample: PartitionedSample) -> Tuple[float, float]:
    weight = sample.t1 / sample.n
    one_prob = sample.t2 / sample.t1 if sample.t1 else 0.0
    return weight, one_prob


def beinf_fit(
    sample: PartitionedSample,
    level: float = config.DEFAULT_LEVEL,
    settings: Optional[OptimSettings] = None,
) -> FitResult:
    """Maximum likelihood fit of the zero-and-one inflated beta model.

    Shapes are reported as (a, b); mean-precision mu = a/(a+b) and
    phi = a + b are added to the derived quantities.
    """
    settings = settings or OptimSettings()
    interior = _interior(sample, "BEINF")
    alpha, gamma = _discrete_estimates(sample)
    a, b, used_fallback = _fit_beta_shapes(interior, settings)
    flags = ["nelder_mead_fallback"] if used_fallback else []

    def interior_ll(x: float, y: float) -> float:
        return beta_interior_loglik(x, y, interior)

    mu = a / (a + b)
    derived = {"mu": mu, "phi": a + b, "mean": alpha * gamma + (1.0 - alpha) * mu}
    logger.debug("BEINF shapes a=%.6f b=%.6f", a, b)
    return _assemble(
        ModelName.BEINF, sample, ("alpha", "gamma", "a", "b"), alpha, gamma, a, b,
        interior_ll(a, b), _shape_errors(interior_ll, a, b), level, derived, flags,
    )


def zoik_fit(
    sample: PartitionedSample,
    level: float = config.DEFAULT_LEVEL,
    settings: Optional[OptimSettings] = None,
) -> FitResult:
    """Maximum likelihood fit of the zero-and-one inflated Kumaraswamy model.

    b has a closed form for fixed a, so only ln(a) is searched, over
    [ln 1e-3, ln 1e3].
    """
    settings = settings or OptimSettings()
    interior = _interior(sample, "ZOIK")
    lam, p = _discrete_estimates(sample)

    lo, hi = _PROFILE_LOG_A_BOUNDS
    log_a, _ = maximize_1d(lambda u: _kumaraswamy_profile(u, interior), lo, hi, settings)
    if log_a - lo < _BOUNDARY_SLACK or hi - log_a < _BOUNDARY_SLACK:
        raise OptimizationError(
            f"Kumaraswamy shape a={math.exp(log_a):.6g} sits at the search bracket edge; "
            "extend the range of a",
            best_x=math.exp(log_a),
        )
    a = math.exp(log_a)
    b = kumaraswamy_profile_b(a, interior)

    def interior_ll(x: float, y: float) -> float:
        return kumaraswamy_interior_loglik(x, y, interior)

    kumaraswamy_mean = math.exp(math.log(b) + betaln(1.0 + 1.0 / a, b))
    derived = {"mean": lam * p + (1.0 - lam) * kumaraswamy_mean}
    logger.debug("ZOIK shapes a=%.6f b=%.6f", a, b)
    return _assemble(
        ModelName.ZOIK, sample, ("lambda", "p", "a", "b"), lam, p, a, b,
        interior_ll(a, b), _shape_errors(interior_ll, a, b), level, derived, [],
    )
