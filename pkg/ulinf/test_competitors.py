"""
Test suite for the inflated beta and inflated Kumaraswamy competitors
Tests log-densities, CDFs, maximum likelihood fits and failure modes
"""

import math

import numpy as np
import pytest
from scipy.stats import beta as beta_dist

from ulinf import competitors
from ulinf.competitors import (
    beinf_cdf,
    beinf_fit,
    beinf_logpdf,
    beta_interior_loglik,
    kumaraswamy_cdf,
    kumaraswamy_interior_loglik,
    kumaraswamy_profile_b,
    zoik_cdf,
    zoik_fit,
    zoik_logpdf,
)
from ulinf.errors import InsufficientDataError, OptimizationError
from ulinf.inference import partition
from ulinf.models import BeinfParams, ModelName, UlinfPoint, ZoikParams
from ulinf.optimizer import fd_gradient, fd_hessian, nelder_mead
from ulinf.special_fn import integrate


def test_beinf_logpdf_points():
    params = BeinfParams(alpha=0.3, gamma=0.6, a=2.0, b=3.0)
    assert beinf_logpdf(UlinfPoint.at_zero(), params) == pytest.approx(math.log(0.3 * 0.4))
    assert beinf_logpdf(UlinfPoint.at_one(), params) == pytest.approx(math.log(0.3 * 0.6))
    assert beinf_logpdf(UlinfPoint.interior(0.4), params) == pytest.approx(
        math.log(0.7 * beta_dist.pdf(0.4, 2.0, 3.0))
    )


def test_beinf_logpdf_zero_weight_is_minus_infinity():
    params = BeinfParams(alpha=0.0, gamma=0.5, a=2.0, b=3.0)
    assert beinf_logpdf(UlinfPoint.at_zero(), params) == -math.inf


def test_zoik_density_integrates_to_interior_weight():
    params = ZoikParams(lam=0.2, p=0.5, a=1.3, b=2.4)
    interior = integrate(lambda y: math.exp(zoik_logpdf(UlinfPoint.interior(y), params)), 0.0, 1.0)
    assert interior == pytest.approx(0.8, abs=1e-9)


def test_mixed_cdfs_jump_at_endpoints():
    beinf = BeinfParams(alpha=0.3, gamma=0.6, a=2.0, b=3.0)
    zoik = ZoikParams(lam=0.3, p=0.6, a=2.0, b=3.0)
    for cdf, params in ((beinf_cdf, beinf), (zoik_cdf, zoik)):
        assert cdf(-0.5, params) == 0.0
        assert cdf(0.0, params) == pytest.approx(0.12)
        assert cdf(1.0, params) == 1.0
        values = cdf(np.linspace(0, 1, 21), params)
        assert np.all(np.diff(values) >= 0)


def test_kumaraswamy_cdf_closed_form():
    assert kumaraswamy_cdf(0.5, 2.0, 3.0) == pytest.approx(1 - (1 - 0.25) ** 3)
    assert kumaraswamy_cdf(1.0, 2.0, 3.0) == 1.0
    assert kumaraswamy_cdf(0.0, 2.0, 3.0) == 0.0


def test_profile_b_maximizes_for_fixed_a():
    interior = np.array([0.2, 0.35, 0.5, 0.6, 0.8])
    a = 1.7
    b = kumaraswamy_profile_b(a, interior)
    best = kumaraswamy_interior_loglik(a, b, interior)
    for other in (0.9 * b, 1.1 * b):
        assert kumaraswamy_interior_loglik(a, other, interior) < best


def test_elephants_beinf_shapes(elephants_sample):
    fit = beinf_fit(elephants_sample)
    assert fit.model is ModelName.BEINF
    assert fit.k == 4
    assert fit.estimates["alpha"] == 8 / 27
    assert fit.estimates["gamma"] == 0.75
    assert fit.estimates["a"] == pytest.approx(1.4065, abs=5e-3)
    assert fit.estimates["b"] == pytest.approx(2.2685, abs=5e-3)
    a, b = fit.estimates["a"], fit.estimates["b"]
    assert fit.derived["mu"] == pytest.approx(a / (a + b))
    assert fit.derived["phi"] == pytest.approx(a + b)
    assert fit.std_errors["a"] > 0 and fit.std_errors["b"] > 0


def test_elephants_zoik_shapes(elephants_sample):
    fit = zoik_fit(elephants_sample)
    assert fit.model is ModelName.ZOIK
    assert fit.estimates["lambda"] == 8 / 27
    assert fit.estimates["p"] == 0.75
    assert fit.estimates["a"] == pytest.approx(1.3514, abs=5e-3)
    assert fit.estimates["b"] == pytest.approx(2.3707, abs=5e-3)
    assert fit.aic == -2.0 * fit.loglik + 2.0 * 4


def test_fitted_shapes_are_stationary(elephants_sample):
    interior = np.asarray(elephants_sample.interior)
    beinf = beinf_fit(elephants_sample).estimates
    grad = fd_gradient(lambda x: beta_interior_loglik(x[0], x[1], interior), (beinf["a"], beinf["b"]))
    assert np.linalg.norm(grad) < 1e-5
    zoik = zoik_fit(elephants_sample).estimates
    grad = fd_gradient(lambda x: kumaraswamy_interior_loglik(x[0], x[1], interior), (zoik["a"], zoik["b"]))
    assert np.linalg.norm(grad) < 1e-5


def test_loglik_includes_discrete_part(elephants_sample):
    fit = beinf_fit(elephants_sample)
    interior = np.asarray(elephants_sample.interior)
    discrete = 8 * math.log(8 / 27) + 19 * math.log(19 / 27) + 6 * math.log(0.75) + 2 * math.log(0.25)
    expected = discrete + beta_interior_loglik(fit.estimates["a"], fit.estimates["b"], interior)
    assert fit.loglik == pytest.approx(expected)


@pytest.mark.parametrize("fitter", [beinf_fit, zoik_fit])
def test_fits_need_two_interior_points(fitter):
    with pytest.raises(InsufficientDataError):
        fitter(partition([0.0, 1.0, 0.4]))


def test_shape_loglik_outside_parameter_space():
    interior = np.array([0.3, 0.6])
    assert beta_interior_loglik(-1.0, 2.0, interior) == -math.inf
    assert kumaraswamy_interior_loglik(1.0, 0.0, interior) == -math.inf


def test_profile_fit_agrees_with_joint_simplex(elephants_sample):
    interior = np.asarray(elephants_sample.interior)
    profiled = zoik_fit(elephants_sample).estimates
    (a, b), _ = nelder_mead(lambda x: kumaraswamy_interior_loglik(x[0], x[1], interior), [1.0, 1.0])
    assert a == pytest.approx(profiled["a"], abs=1e-5)
    assert b == pytest.approx(profiled["b"], abs=1e-5)


def test_zoik_recovers_kumaraswamy_shapes():
    rng = np.random.default_rng(2024)
    u = rng.random(100_000)
    draws = (1.0 - (1.0 - u) ** (1.0 / 3.0)) ** (1.0 / 2.0)
    fit = zoik_fit(partition(draws))
    assert fit.estimates["a"] == pytest.approx(2.0, abs=0.05)
    assert fit.estimates["b"] == pytest.approx(3.0, abs=0.1)
    assert fit.estimates["lambda"] == 0.0


def test_beinf_shapes_are_equal_on_mirrored_data():
    half = np.random.default_rng(8).beta(2.0, 2.0, 200)
    fit = beinf_fit(partition(np.concatenate([half, 1.0 - half, [0.0, 1.0]])))
    assert fit.estimates["a"] == pytest.approx(fit.estimates["b"], rel=1e-6)
    assert fit.derived["mu"] == pytest.approx(0.5, abs=1e-6)


def test_beinf_masses_and_interior_sum_to_one():
    params = BeinfParams(alpha=0.3, gamma=0.5, a=1.4065, b=2.2685)
    interior = integrate(lambda y: math.exp(beinf_logpdf(y, params)), 0.0, 1.0)
    total = math.exp(beinf_logpdf(0.0, params)) + math.exp(beinf_logpdf(1.0, params)) + interior
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("fitter, loglik_fn", [
    (beinf_fit, beta_interior_loglik),
    (zoik_fit, kumaraswamy_interior_loglik),
])
def test_fitted_shapes_beat_perturbations(elephants_sample, fitter, loglik_fn):
    interior = np.asarray(elephants_sample.interior)
    est = fitter(elephants_sample).estimates
    best = loglik_fn(est["a"], est["b"], interior)
    rng = np.random.default_rng(3)
    for da, db in rng.normal(0.0, 0.05, (100, 2)):
        assert loglik_fn(est["a"] * (1 + da), est["b"] * (1 + db), interior) <= best


@pytest.mark.parametrize("fitter, loglik_fn", [
    (beinf_fit, beta_interior_loglik),
    (zoik_fit, kumaraswamy_interior_loglik),
])
def test_hessian_is_negative_definite_at_fit(elephants_sample, fitter, loglik_fn):
    interior = np.asarray(elephants_sample.interior)
    est = fitter(elephants_sample).estimates
    hessian = fd_hessian(lambda x: loglik_fn(x[0], x[1], interior), (est["a"], est["b"]))
    assert np.all(np.linalg.eigvalsh(hessian) < 0.0)


def test_zoik_optimum_at_bracket_edge_is_an_error(monkeypatch, elephants_sample):
    monkeypatch.setattr(competitors, "_PROFILE_LOG_A_BOUNDS", (math.log(5.0), math.log(10.0)))
    with pytest.raises(OptimizationError) as info:
        zoik_fit(elephants_sample)
    assert info.value.best_x == pytest.approx(5.0, rel=1e-5)


def test_beinf_falls_back_to_simplex(monkeypatch, elephants_sample):
    newton = beinf_fit(elephants_sample)
    monkeypatch.setattr(competitors, "_beta_newton", lambda interior, settings: None)
    fallback = beinf_fit(elephants_sample)
    assert "nelder_mead_fallback" in fallback.flags
    assert "nelder_mead_fallback" not in newton.flags
    assert fallback.estimates["a"] == pytest.approx(newton.estimates["a"], abs=1e-4)
    assert fallback.estimates["b"] == pytest.approx(newton.estimates["b"], abs=1e-4)


def test_logpdfs_classify_plain_numbers():
    beinf = BeinfParams(alpha=0.3, gamma=0.6, a=2.0, b=3.0)
    zoik = ZoikParams(lam=0.3, p=0.6, a=2.0, b=3.0)
    assert beinf_logpdf(1.0, beinf) == beinf_logpdf(UlinfPoint.at_one(), beinf)
    assert zoik_logpdf(0.0, zoik) == zoik_logpdf(UlinfPoint.at_zero(), zoik)
    assert zoik_logpdf(0.4, zoik) == zoik_logpdf(UlinfPoint.interior(0.4), zoik)
