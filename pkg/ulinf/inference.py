"""
Likelihood inference for ULINF
Sufficient statistics, closed-form MLEs, log-likelihood, Fisher information,
Wald intervals and the delta method.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri, xlogy

from ulinf import config
from ulinf.errors import DomainError, InsufficientDataError, SampleValidationError, SingularInformationError
from ulinf.inflated_mixture import ulinf_mean_variance
from ulinf.models import FitResult, ModelName, PartitionedSample, UlinfEstimate, UlinfParams
from ulinf.optimizer import fd_gradient

logger = logging.getLogger(__name__)

PARAMETER_NAMES = ("alpha", "p", "theta")


def validate_sample(values: Sequence[float]) -> np.ndarray:
    """Array of the observations; SampleValidationError names the first value outside [0, 1]"""
    arr = np.asarray(values, dtype=float).ravel()
    bad = np.flatnonzero(~((arr >= 0.0) & (arr <= 1.0)))
    if bad.size:
        index = int(bad[0])
        raise SampleValidationError(index, float(arr[index]))
    return arr


def sufficient_statistics(values: np.ndarray) -> Tuple[int, int, int, np.ndarray, float]:
    """(n, T1, T2, interior, t(y)) for an already validated array"""
    is_zero = values == 0.0
    is_one = values == 1.0
    interior = values[~(is_zero | is_one)]
    t1 = int(np.count_nonzero(is_zero) + np.count_nonzero(is_one))
    t2 = int(np.count_nonzero(is_one))
    t_y = float(np.sum(interior / (1.0 - interior)))
    return values.size, t1, t2, interior, t_y


def partition(sample: Sequence[float]) -> PartitionedSample:
    """Split a sample into endpoint counts and interior values"""
    n, t1, t2, interior, t_y = sufficient_statistics(validate_sample(sample))
    return PartitionedSample(n=n, t1=t1, t2=t2, interior=tuple(interior.tolist()), t_y=t_y)


def theta_mle(t_y: float, n_interior: int) -> Optional[float]:
    """Root of 2 nc/theta - nc/(1+theta) - t = 0; None without interior data"""
    if n_interior <= 0 or not t_y > 0.0:
        return None
    nc = float(n_interior)
    return (nc - t_y + math.sqrt(t_y * t_y + 6.0 * nc * t_y + nc * nc)) / (2.0 * t_y)


def mle(sample: PartitionedSample) -> UlinfEstimate:
    """alpha = T1/n, p = T2/T1 (0/0 read as 0), theta from the closed form"""
    alpha = sample.t1 / sample.n if sample.n else 0.0
    p = sample.t2 / sample.t1 if sample.t1 else 0.0
    theta = theta_mle(sample.t_y, sample.n_interior)
    if theta is None:
        logger.debug("no interior observations, theta left undefined")
    return UlinfEstimate(alpha=alpha, p=p, theta=theta)


def loglik_alpha(alpha: float, sample: PartitionedSample) -> float:
    """T1 ln(alpha) + (n - T1) ln(1 - alpha), with 0 ln 0 = 0"""
    return float(xlogy(sample.t1, alpha) + xlogy(sample.n - sample.t1, 1.0 - alpha))


def loglik_p(p: float, sample: PartitionedSample) -> float:
    """T2 ln(p) + (T1 - T2) ln(1 - p), with 0 ln 0 = 0"""
    return float(xlogy(sample.t2, p) + xlogy(sample.t1 - sample.t2, 1.0 - p))


def loglik_theta(theta: float, sample: PartitionedSample) -> float:
    """2 nc ln(theta) - nc ln(1+theta) - theta t(y) - 3 sum ln(1 - y) over the interior"""
    nc = sample.n_interior
    if nc == 0:
        return 0.0
    log_tail = float(np.sum(np.log1p(-np.asarray(sample.interior))))
    return 2.0 * nc * math.log(theta) - nc * math.log1p(theta) - theta * sample.t_y - 3.0 * log_tail


def loglik(params: UlinfParams, sample: PartitionedSample) -> float:
    """Full log-likelihood, the sum of the three factor terms; -inf outside the support"""
    return (
        loglik_alpha(params.alpha, sample)
        + loglik_p(params.p, sample)
        + loglik_theta(params.theta, sample)
    )


def information_diagonal(params: UlinfParams, n: int, nc: int) -> np.ndarray:
    """(k_aa, k_pp, k_tt); entries at a boundary alpha or p are inf"""
    alpha, p, theta = params.as_tuple()
    with np.errstate(divide="ignore"):
        k_alpha = n / (alpha * (1.0 - alpha)) if 0.0 < alpha < 1.0 else math.inf
        k_p = n * alpha / (p * (1.0 - p)) if 0.0 < p < 1.0 else math.inf
    k_theta = nc * (2.0 / theta ** 2 - 1.0 / (1.0 + theta) ** 2)
    return np.array([k_alpha, k_p, k_theta])


def fisher_information(
    params: UlinfParams,
    n: int,
    nc: int,
    free: Sequence[str] = PARAMETER_NAMES,
) -> np.ndarray:
    """Diagonal information matrix; the three parameters are orthogonal.

    nc, the number of interior observations, scales the theta entry. With
    `free` a subset of (alpha, p, theta), only those rows and columns are
    kept, so a boundary estimate can be left out of the matrix.
    """
    for name in ("alpha", "p"):
        value = getattr(params, name)
        if name in free and not 0.0 < value < 1.0:
            raise SingularInformationError(f"information is singular at {name}={value}")
    diagonal = information_diagonal(params, n, nc)
    return np.diag(diagonal[[PARAMETER_NAMES.index(name) for name in free]])


def _inverse(info: np.ndarray) -> np.ndarray:
    info = np.asarray(info, dtype=float)
    if not np.all(np.isfinite(info)):
        raise SingularInformationError("information matrix has non-finite entries")
    try:
        return np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularInformationError(f"information matrix is singular: {exc}") from exc


def normal_quantile(level: float) -> float:
    """z_{1 - a/2} for a two-sided interval at the given level"""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return float(ndtri(0.5 + 0.5 * level))


def _clip_interval(name: str, lo: float, hi: float) -> Tuple[float, float]:
    if name in ("alpha", "p"):
        return max(lo, 0.0), min(hi, 1.0)
    return max(lo, np.nextafter(0.0, 1.0)), hi


def standard_errors(info: np.ndarray, free: Sequence[str] = PARAMETER_NAMES) -> Dict[str, float]:
    """Square roots of the diagonal of the inverse information"""
    covariance = _inverse(info)
    return {name: math.sqrt(covariance[i, i]) for i, name in enumerate(free)}


def wald_intervals(
    params: UlinfParams,
    info: np.ndarray,
    level: float = config.DEFAULT_LEVEL,
    free: Sequence[str] = PARAMETER_NAMES,
) -> Dict[str, Tuple[float, float]]:
    """estimate -/+ z se per free parameter, clipped to the parameter space"""
    z = normal_quantile(level)
    intervals = {}
    for name, se in standard_errors(info, free).items():
        estimate = getattr(params, name)
        intervals[name] = _clip_interval(name, estimate - z * se, estimate + z * se)
    return intervals


def mean_gradient(params: UlinfParams) -> np.ndarray:
    """Gradient of alpha p + (1-alpha)/(1+theta) with respect to (alpha, p, theta)"""
    alpha, p, theta = params.as_tuple()
    return np.array([
        p - 1.0 / (1.0 + theta),
        alpha,
        -(1.0 - alpha) / (1.0 + theta) ** 2,
    ])


def delta_method_se(
    params: UlinfParams,
    info: np.ndarray,
    gradient: Optional[Sequence[float]] = None,
) -> float:
    """sqrt(g' K^-1 g); the default gradient is that of the mean"""
    g = mean_gradient(params) if gradient is None else np.asarray(gradient, dtype=float)
    return float(math.sqrt(g @ _inverse(info) @ g))


def variance_gradient(params: UlinfParams) -> np.ndarray:
    """Central-difference gradient of the ULINF variance"""

    def variance(x: np.ndarray) -> float:
        return ulinf_mean_variance(UlinfParams(alpha=x[0], p=x[1], theta=x[2]))[1]

    return fd_gradient(variance, params.as_tuple())


def fit_ulinf(sample: PartitionedSample, level: float = config.DEFAULT_LEVEL) -> FitResult:
    """Closed-form fit with Wald intervals and delta-method derived quantities.

    Boundary estimates keep their value but get no interval and a flag.
    """
    if sample.n == 0:
        raise InsufficientDataError("cannot fit an empty sample")
    estimate = mle(sample)
    z = normal_quantile(level)
    flags = []

    ll = loglik_alpha(estimate.alpha, sample) + loglik_p(estimate.p, sample)
    if estimate.theta is not None:
        ll += loglik_theta(estimate.theta, sample)
    else:
        flags.append("theta_undefined_no_interior")

    estimates = {"alpha": estimate.alpha, "p": estimate.p, "theta": estimate.theta}
    free = [name for name in ("alpha", "p") if 0.0 < estimates[name] < 1.0]
    flags += [f"{name}_on_boundary_no_interval" for name in ("alpha", "p") if name not in free]
    if estimate.theta is not None:
        free.append("theta")

    # theta only enters the third diagonal entry
    at = UlinfParams(alpha=estimate.alpha, p=estimate.p, theta=estimate.theta or 1.0)
    std_errors: Dict[str, Optional[float]] = {name: None for name in PARAMETER_NAMES}
    intervals: Dict[str, Optional[Tuple[float, float]]] = {name: None for name in PARAMETER_NAMES}
    if free:
        info = fisher_information(at, sample.n, sample.n_interior, free)
        std_errors.update(standard_errors(info, free))
        intervals.update(wald_intervals(at, info, level, free))

    derived: Dict[str, float] = {}
    derived_se: Dict[str, Optional[float]] = {}
    derived_ci: Dict[str, Optional[Tuple[float, float]]] = {}
    if estimate.theta is not None:
        params = estimate.to_params()
        mean, variance = ulinf_mean_variance(params)
        derived = {"mean": mean, "variance": variance}
        derived_se = {"mean": None, "variance": None}
        derived_ci = {"mean": None, "variance": None}
        if len(free) == len(PARAMETER_NAMES):
            for name, value, gradient_fn in (
                ("mean", mean, mean_gradient),
                ("variance", variance, variance_gradient),
            ):
                try:
                    gradient = gradient_fn(params)
                except ValueError:
                    # finite-difference step went outside the parameter space
                    flags.append(f"{name}_delta_method_unavailable")
                    continue
                se = delta_method_se(params, info, gradient)
                derived_se[name] = se
                derived_ci[name] = (max(value - z * se, 0.0), value + z * se)

    logger.debug("ULINF fit: %s, loglik=%.6f", estimates, ll)
    return FitResult.build(
        ModelName.ULINF,
        loglik=ll,
        n=sample.n,
        estimates=estimates,
        std_errors=std_errors,
        conf_intervals=intervals,
        level=level,
        derived=derived,
        derived_std_errors=derived_se,
        derived_conf_intervals=derived_ci,
        flags=flags,
    )
