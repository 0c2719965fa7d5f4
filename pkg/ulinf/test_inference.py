"""
Test suite for ULINF likelihood inference
Tests sufficient statistics, closed-form estimates, information, Wald intervals and the delta method
"""

import math

import numpy as np
import pytest
from scipy.stats import norm

from ulinf.errors import InsufficientDataError, SampleValidationError, SingularInformationError
from ulinf.inference import (
    delta_method_se,
    fisher_information,
    fit_ulinf,
    information_diagonal,
    loglik,
    loglik_alpha,
    loglik_p,
    loglik_theta,
    mean_gradient,
    mle,
    normal_quantile,
    partition,
    standard_errors,
    theta_mle,
    validate_sample,
    wald_intervals,
)
from ulinf.inflated_mixture import ulinf_mean_variance, ulinf_sample
from ulinf.models import ModelName, SamplingMode, UlinfEstimate, UlinfParams
from ulinf.optimizer import fd_hessian, maximize_1d


def test_partition_counts(elephants_sample):
    assert elephants_sample.n == 27
    assert elephants_sample.t1 == 8
    assert elephants_sample.t2 == 6
    assert elephants_sample.n_interior == 19
    assert elephants_sample.n_zeros == 2
    assert elephants_sample.t_y == pytest.approx(18.53279, abs=1e-4)


def test_mle_reproduces_elephants_estimates(elephants_sample):
    estimate = mle(elephants_sample)
    assert estimate.alpha == 8 / 27
    assert estimate.p == 0.75
    assert estimate.theta == pytest.approx(1.4446, abs=5e-4)


def test_theta_solves_score_equation(elephants_sample):
    theta = mle(elephants_sample).theta
    nc, t = elephants_sample.n_interior, elephants_sample.t_y
    assert 2 * nc / theta - nc / (1 + theta) - t == pytest.approx(0.0, abs=1e-10)


def test_theta_undefined_without_interior():
    assert theta_mle(0.0, 0) is None
    estimate = mle(partition([0.0, 1.0, 1.0]))
    assert estimate.theta is None
    with pytest.raises(InsufficientDataError):
        estimate.to_params()


def test_p_defaults_to_zero_without_endpoints():
    estimate = mle(partition([0.2, 0.4, 0.6]))
    assert estimate.alpha == 0.0
    assert estimate.p == 0.0


def test_validate_sample_names_offending_index():
    with pytest.raises(SampleValidationError) as info:
        validate_sample([0.2, 0.0, 1.5, 0.3])
    assert info.value.index == 2
    assert info.value.value == 1.5
    with pytest.raises(SampleValidationError):
        validate_sample([0.1, float("nan")])


def test_closed_form_theta_matches_numeric_maximum():
    rng = np.random.default_rng(17)
    for _ in range(25):
        truth = UlinfParams(alpha=0.3, p=0.5, theta=float(rng.uniform(0.3, 5.0)))
        sample = partition(ulinf_sample(60, truth, rng))
        closed = mle(sample).theta
        numeric, _ = maximize_1d(lambda th: loglik_theta(th, sample), 1e-3, 60.0)
        assert numeric == pytest.approx(closed, abs=1e-6)


@pytest.mark.slow
def test_closed_form_theta_matches_numeric_maximum_many_samples():
    rng = np.random.default_rng(18)
    for _ in range(1000):
        truth = UlinfParams(alpha=0.25, p=0.4, theta=float(rng.uniform(0.2, 8.0)))
        sample = partition(ulinf_sample(100, truth, rng))
        closed = mle(sample).theta
        numeric, _ = maximize_1d(lambda th: loglik_theta(th, sample), 1e-3, 200.0)
        assert numeric == pytest.approx(closed, abs=1e-6)


def test_loglik_is_sum_of_factors(elephants_sample):
    params = mle(elephants_sample).to_params()
    total = loglik(params, elephants_sample)
    parts = (
        loglik_alpha(params.alpha, elephants_sample)
        + loglik_p(params.p, elephants_sample)
        + loglik_theta(params.theta, elephants_sample)
    )
    assert total == pytest.approx(parts)
    assert loglik_alpha(params.alpha, elephants_sample) == pytest.approx(
        8 * math.log(8 / 27) + 19 * math.log(19 / 27)
    )


def test_loglik_handles_boundary_parameters():
    sample = partition([0.0, 0.0, 0.3, 0.6])
    assert loglik_p(0.0, sample) == 0.0
    assert loglik_p(1.0, sample) == -math.inf


def test_information_diagonal(elephants_sample):
    params = mle(elephants_sample).to_params()
    k_alpha, k_p, k_theta = information_diagonal(params, 27, 19)
    alpha, p, theta = params.as_tuple()
    assert k_alpha == pytest.approx(27 / (alpha * (1 - alpha)))
    assert k_p == pytest.approx(27 * alpha / (p * (1 - p)))
    assert k_theta == pytest.approx(19 * (2 / theta ** 2 - 1 / (1 + theta) ** 2))


def test_information_is_singular_on_the_boundary():
    with pytest.raises(SingularInformationError):
        fisher_information(UlinfParams(alpha=0.0, p=0.5, theta=1.0), 10, 10)
    with pytest.raises(SingularInformationError):
        fisher_information(UlinfParams(alpha=0.3, p=1.0, theta=1.0), 10, 7)


def test_normal_quantile():
    assert normal_quantile(0.95) == pytest.approx(1.959963984540054, rel=1e-12)
    assert normal_quantile(0.9) == pytest.approx(norm.ppf(0.95), rel=1e-12)


def test_wald_intervals_are_clipped():
    params = UlinfParams(alpha=0.05, p=0.5, theta=1.0)
    info = fisher_information(params, 20, 19)
    intervals = wald_intervals(params, info, 0.95)
    assert intervals["alpha"][0] == 0.0
    for name, value in zip(("alpha", "p", "theta"), params.as_tuple()):
        lo, hi = intervals[name]
        assert lo <= value <= hi


def test_delta_method_for_the_mean(elephants_sample):
    params = mle(elephants_sample).to_params()
    info = fisher_information(params, elephants_sample.n, elephants_sample.n_interior)
    g = mean_gradient(params)
    expected = math.sqrt(sum(g[i] ** 2 / info[i, i] for i in range(3)))
    assert delta_method_se(params, info) == pytest.approx(expected)


def test_mean_gradient_matches_finite_differences():
    params = UlinfParams(alpha=0.3, p=0.6, theta=2.0)
    h = 1e-6
    numeric = []
    for i in range(3):
        up, down = list(params.as_tuple()), list(params.as_tuple())
        up[i] += h
        down[i] -= h
        mean_up = ulinf_mean_variance(UlinfParams(alpha=up[0], p=up[1], theta=up[2]))[0]
        mean_down = ulinf_mean_variance(UlinfParams(alpha=down[0], p=down[1], theta=down[2]))[0]
        numeric.append((mean_up - mean_down) / (2 * h))
    assert mean_gradient(params) == pytest.approx(numeric, abs=1e-8)


def test_fit_ulinf_on_elephants(elephants_sample):
    fit = fit_ulinf(elephants_sample, 0.95)
    assert fit.model is ModelName.ULINF
    assert fit.k == 3
    assert fit.flags == []
    assert fit.aic == -2.0 * fit.loglik + 2.0 * 3
    assert fit.bic == -2.0 * fit.loglik + 3 * math.log(27)
    alpha = 8 / 27
    assert fit.std_errors["alpha"] == pytest.approx(math.sqrt(alpha * (1 - alpha) / 27))
    assert fit.std_errors["p"] == pytest.approx(math.sqrt(0.75 * 0.25 / 8))
    lo, hi = fit.conf_intervals["theta"]
    assert lo < fit.estimates["theta"] < hi
    assert fit.derived["mean"] == pytest.approx(alpha * 0.75 + (1 - alpha) / (1 + fit.estimates["theta"]))
    assert fit.derived_std_errors["mean"] > 0
    assert fit.derived_std_errors["variance"] > 0


def test_fit_ulinf_flags_boundary_p():
    fit = fit_ulinf(partition([0.0, 0.0, 0.3, 0.5, 0.7]))
    assert fit.estimates["p"] == 0.0
    assert fit.conf_intervals["p"] is None
    assert "p_on_boundary_no_interval" in fit.flags
    assert fit.conf_intervals["alpha"] is not None
    assert fit.derived_std_errors["mean"] is None


def test_fit_ulinf_without_interior():
    fit = fit_ulinf(partition([0.0, 1.0, 1.0]))
    assert fit.estimates["theta"] is None
    assert "theta_undefined_no_interior" in fit.flags
    assert fit.derived == {}


def test_fit_ulinf_rejects_empty_sample():
    with pytest.raises(InsufficientDataError):
        fit_ulinf(partition([]))


def test_estimate_roundtrips_to_params():
    params = UlinfEstimate(alpha=0.2, p=0.5, theta=1.2).to_params()
    assert params.as_tuple() == (0.2, 0.5, 1.2)


@pytest.mark.slow
def test_theta_sampling_spread_matches_information():
    truth = UlinfParams(alpha=0.25, p=0.4, theta=1.5)
    rng = np.random.default_rng(101)
    n = 1000
    estimates = []
    for _ in range(10_000):
        sample = partition(ulinf_sample(n, truth, rng, SamplingMode.STRATIFIED))
        estimates.append(mle(sample).theta)
    nc = n - 250
    expected_sd = 1.0 / math.sqrt(information_diagonal(truth, n, nc)[2])
    assert np.std(estimates, ddof=1) == pytest.approx(expected_sd, rel=0.1)


@pytest.mark.slow
def test_theta_wald_interval_coverage():
    truth = UlinfParams(alpha=0.25, p=0.4, theta=1.5)
    rng = np.random.default_rng(202)
    z = normal_quantile(0.95)
    covered = 0
    reps = 10_000
    for _ in range(reps):
        sample = partition(ulinf_sample(500, truth, rng, SamplingMode.STRATIFIED))
        theta = mle(sample).theta
        k = sample.n_interior * (2 / theta ** 2 - 1 / (1 + theta) ** 2)
        covered += abs(theta - truth.theta) <= z / math.sqrt(k)
    assert covered / reps == pytest.approx(0.95, abs=0.01)


def test_mle_beats_random_perturbations(elephants_sample):
    best = mle(elephants_sample).to_params()
    top = loglik(best, elephants_sample)
    rng = np.random.default_rng(5)
    for _ in range(200):
        alpha, p, theta = np.array(best.as_tuple()) + rng.normal(0.0, 0.05, 3)
        if not (0.0 < alpha < 1.0 and 0.0 < p < 1.0 and theta > 0.0):
            continue
        assert loglik(UlinfParams(alpha=alpha, p=p, theta=theta), elephants_sample) <= top


def test_observed_theta_information_matches_expected(elephants_sample):
    theta = mle(elephants_sample).theta
    nc = elephants_sample.n_interior
    hessian = fd_hessian(lambda x: loglik_theta(x[0], elephants_sample), [theta])
    expected = nc * (2.0 / theta ** 2 - 1.0 / (1.0 + theta) ** 2)
    assert -hessian[0, 0] == pytest.approx(expected, rel=1e-4)


def test_delta_method_with_unit_gradient_is_alpha_se(elephants_sample):
    params = mle(elephants_sample).to_params()
    info = fisher_information(params, elephants_sample.n, elephants_sample.n_interior)
    alpha = params.alpha
    assert delta_method_se(params, info, [1.0, 0.0, 0.0]) == pytest.approx(math.sqrt(alpha * (1 - alpha) / 27))


def test_theta_maximizer_on_elephants(elephants_sample):
    theta, _ = maximize_1d(lambda th: loglik_theta(th, elephants_sample), 1e-3, 50.0)
    assert theta == pytest.approx(1.4446, abs=5e-4)


def test_information_of_free_parameters_only():
    params = UlinfParams(alpha=0.3, p=1.0, theta=2.0)
    info = fisher_information(params, 20, 14, ["alpha", "theta"])
    assert info.shape == (2, 2)
    assert info[1, 1] == pytest.approx(information_diagonal(params, 20, 14)[2])
    errors = standard_errors(info, ["alpha", "theta"])
    assert set(errors) == {"alpha", "theta"}
    intervals = wald_intervals(params, info, 0.95, ["alpha", "theta"])
    assert set(intervals) == {"alpha", "theta"}


def test_fit_ulinf_uses_wald_intervals(elephants_sample):
    fit = fit_ulinf(elephants_sample, 0.9)
    params = mle(elephants_sample).to_params()
    expected = wald_intervals(params, fisher_information(params, 27, 19), 0.9)
    for name, (lo, hi) in expected.items():
        assert fit.conf_intervals[name][0] == pytest.approx(lo, rel=1e-12)
        assert fit.conf_intervals[name][1] == pytest.approx(hi, rel=1e-12)


def test_fit_ulinf_boundary_keeps_other_intervals():
    fit = fit_ulinf(partition([1.0, 1.0, 0.3, 0.5, 0.7]))
    assert "p_on_boundary_no_interval" in fit.flags
    assert fit.std_errors["p"] is None
    assert fit.std_errors["alpha"] == pytest.approx(math.sqrt(0.4 * 0.6 / 5))
    assert fit.conf_intervals["theta"] is not None
