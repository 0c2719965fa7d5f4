"""
Derivative-free optimization toolkit
1-D Brent maximization, Nelder-Mead simplex and finite-difference derivatives.
Every public function speaks in maxima; internally -f is minimized.
"""

import logging
import math
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from ulinf.errors import DomainError, OptimizationError
from ulinf.models import OptimSettings

logger = logging.getLogger(__name__)

_GOLDEN = 0.381966011250105097  # (3 - sqrt(5)) / 2
_SQRT_EPS = math.sqrt(np.finfo(float).eps)
_CBRT_EPS = np.finfo(float).eps ** (1.0 / 3.0)
_QUARTIC_EPS = np.finfo(float).eps ** 0.25


class Optimum(NamedTuple):
    x: object  # float for 1-D searches, ndarray otherwise
    value: float


def maximize_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    settings: Optional[OptimSettings] = None,
) -> Optimum:
    """Brent's method (golden section plus parabolic steps) on [lo, hi]"""
    settings = settings or OptimSettings()
    if not lo < hi:
        raise DomainError(f"bracket needs lo < hi, got lo={lo!r}, hi={hi!r}")

    def g(t: float) -> float:
        value = f(t)
        if math.isnan(value):
            raise OptimizationError(f"objective is NaN at x={t!r}", best_x=t)
        return -value

    a, b = float(lo), float(hi)
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = g(x)
    d = e = 0.0
    abs_tol = settings.x_tol / 3.0

    for iteration in range(settings.max_iter):
        mid = 0.5 * (a + b)
        tol1 = _SQRT_EPS * abs(x) + abs_tol
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (b - a):
            logger.debug("maximize_1d converged after %d iterations at x=%.12g", iteration, x)
            return Optimum(x, -fx)

        golden_step = True
        if abs(e) > tol1:
            # parabola through (x, fx), (w, fw), (v, fv)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            previous_e = e
            e = d
            if abs(p) < abs(0.5 * q * previous_e) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < mid else -tol1
                golden_step = False
        if golden_step:
            e = (b - x) if x < mid else (a - x)
            d = _GOLDEN * e

        u = x + d if abs(d) >= tol1 else x + (tol1 if d > 0 else -tol1)
        fu = g(u)

        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

    raise OptimizationError(
        f"maximize_1d did not converge in {settings.max_iter} iterations",
        best_x=x,
        best_value=-fx,
    )


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    settings: Optional[OptimSettings] = None,
) -> Optimum:
    """Nelder-Mead simplex maximization.

    The start simplex is x0 plus a 5% step per coordinate (0.00025 for zero
    coordinates), so results are reproducible. Stops when the simplex
    diameter falls below x_tol or the spread of values below f_tol.
    """
    settings = settings or OptimSettings()
    x0 = np.asarray(x0, dtype=float).ravel()
    dim = x0.size

    def g(x: np.ndarray) -> float:
        value = f(x)
        return math.inf if math.isnan(value) else -value

    f0 = g(x0)
    if not math.isfinite(f0):
        raise DomainError(f"objective must be finite at the start point {x0.tolist()}")

    simplex = np.empty((dim + 1, dim))
    simplex[0] = x0
    for k in range(dim):
        vertex = x0.copy()
        vertex[k] = vertex[k] * 1.05 if vertex[k] != 0.0 else 0.00025
        simplex[k + 1] = vertex
    values = np.array([f0] + [g(vertex) for vertex in simplex[1:]])

    rho, chi, psi, sigma = 1.0, 2.0, 0.5, 0.5
    trace = []
    for iteration in range(settings.max_iter):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        trace.append(-values[0])

        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        spread = np.max(np.abs(values[1:] - values[0]))
        if diameter <= settings.x_tol or spread <= settings.f_tol:
            logger.debug("nelder_mead converged after %d iterations", iteration)
            return Optimum(simplex[0].copy(), -values[0])

        centroid = simplex[:-1].mean(axis=0)
        reflected = (1.0 + rho) * centroid - rho * simplex[-1]
        f_reflected = g(reflected)

        if f_reflected < values[0]:
            expanded = (1.0 + rho * chi) * centroid - rho * chi * simplex[-1]
            f_expanded = g(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue

        if f_reflected < values[-1]:
            contracted = (1.0 + psi * rho) * centroid - psi * rho * simplex[-1]
            f_contracted = g(contracted)
            if f_contracted <= f_reflected:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        else:
            contracted = (1.0 - psi) * centroid + psi * simplex[-1]
            f_contracted = g(contracted)
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
                continue

        # shrink towards the best vertex
        for j in range(1, dim + 1):
            simplex[j] = simplex[0] + sigma * (simplex[j] - simplex[0])
            values[j] = g(simplex[j])

    best = int(np.argmin(values))
    raise OptimizationError(
        f"nelder_mead did not converge in {settings.max_iter} iterations",
        best_x=simplex[best].copy(),
        best_value=-values[best],
        trace=trace,
    )


def _steps(x: np.ndarray, settings: OptimSettings, base: float) -> np.ndarray:
    if settings.fd_step is not None:
        return np.full(x.shape, settings.fd_step)
    return base * np.maximum(np.abs(x), 1.0)


def _evaluate(f: Callable[[np.ndarray], float], x: np.ndarray) -> float:
    value = float(f(x))
    if not math.isfinite(value):
        raise OptimizationError(f"non-finite objective at point {x.tolist()}", best_x=x.copy())
    return value


def fd_gradient(
    f: Callable[[np.ndarray], float],
    x: Sequence[float],
    settings: Optional[OptimSettings] = None,
) -> np.ndarray:
    """Central-difference gradient, step eps^(1/3) max(|x_i|, 1) unless fd_step is set"""
    settings = settings or OptimSettings()
    x = np.asarray(x, dtype=float).ravel()
    h = _steps(x, settings, _CBRT_EPS)
    grad = np.empty(x.size)
    for i in range(x.size):
        step = np.zeros(x.size)
        step[i] = h[i]
        grad[i] = (_evaluate(f, x + step) - _evaluate(f, x - step)) / (2.0 * h[i])
    return grad


def fd_hessian(
    f: Callable[[np.ndarray], float],
    x: Sequence[float],
    settings: Optional[OptimSettings] = None,
) -> np.ndarray:
    """Central-difference Hessian, symmetrized as (H + H^T)/2.

    The default step is eps^(1/4) max(|x_i|, 1), which balances truncation
    and rounding for second differences.
    """
    settings = settings or OptimSettings()
    x = np.asarray(x, dtype=float).ravel()
    h = _steps(x, settings, _QUARTIC_EPS)
    dim = x.size
    f0 = _evaluate(f, x)
    hess = np.empty((dim, dim))
    for i in range(dim):
        ei = np.zeros(dim)
        ei[i] = h[i]
        hess[i, i] = (_evaluate(f, x + ei) - 2.0 * f0 + _evaluate(f, x - ei)) / (h[i] * h[i])
        for j in range(i + 1, dim):
            ej = np.zeros(dim)
            ej[j] = h[j]
            hess[i, j] = (
                _evaluate(f, x + ei + ej)
                - _evaluate(f, x + ei - ej)
                - _evaluate(f, x - ei + ej)
                + _evaluate(f, x - ei - ej)
            ) / (4.0 * h[i] * h[j])
            hess[j, i] = hess[i, j]
    return 0.5 * (hess + hess.T)
