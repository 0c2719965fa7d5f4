"""
Test suite for the Monte Carlo study
Tests reproducible streams, aggregation, dropped replications and table rendering
"""

import numpy as np
import pytest
from scipy.stats import anderson

from ulinf.inflated_mixture import ulinf_sample
from ulinf.models import Estimand, SamplingMode, SimDesign, UlinfParams
from ulinf.simulation import (
    TABLE_ROWS,
    estimate_replication,
    replication_rng,
    report_to_csv,
    report_to_table,
    report_to_text,
    run_simulation,
)

TRUTH = UlinfParams(alpha=0.25, p=0.4, theta=1.5)


def small_design(**overrides):
    fields = dict(truth=TRUTH, sample_sizes=[50, 100], replications=40, seed=7, workers=1)
    fields.update(overrides)
    return SimDesign(**fields)


def test_replication_streams_are_keyed():
    first = replication_rng(7, 50, 3).random(4)
    again = replication_rng(7, 50, 3).random(4)
    other = replication_rng(7, 50, 4).random(4)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_estimate_replication_drops_samples_without_interior():
    assert estimate_replication(np.array([0.0, 1.0, 1.0])) is None
    row = estimate_replication(np.array([0.0, 1.0, 0.3, 0.6]))
    assert row[0] == 0.5 and row[2] == 0.5
    assert row.shape == (5,)


def test_report_cells_and_invariants():
    report = run_simulation(small_design())
    assert len(report.cells) == 2 * 5
    for cell in report.cells:
        assert cell.mse >= cell.bias ** 2 - 1e-12
        assert cell.replications_used == 40
    assert report.cell(50, Estimand.ALPHA).truth == 0.25
    assert report.cell(100, Estimand.MEAN).truth == pytest.approx(0.25 * 0.4 + 0.75 / 2.5)
    # stratified sampling fixes the endpoint share
    assert report.cell(100, Estimand.ALPHA).bias == 0.0
    assert report.total_dropped == 0


def test_run_is_reproducible():
    assert run_simulation(small_design()) == run_simulation(small_design())


def test_parallel_run_matches_serial():
    serial = run_simulation(small_design(replications=24))
    parallel = run_simulation(small_design(replications=24, workers=2))
    assert serial.cells == parallel.cells


def test_mixture_mode_differs_from_stratified():
    stratified = run_simulation(small_design(sample_sizes=[100]))
    mixture = run_simulation(small_design(sample_sizes=[100], mode=SamplingMode.MIXTURE))
    assert stratified.cell(100, Estimand.ALPHA).bias == 0.0
    assert mixture.cells != stratified.cells


def test_stratified_endpoint_share_rounds_half_up():
    # alpha n = 12.5 gives 13 endpoints at n = 50
    report = run_simulation(small_design(sample_sizes=[50]))
    assert report.cell(50, Estimand.ALPHA).mean_estimate == pytest.approx(13 / 50)
    assert report.cell(50, Estimand.ALPHA).bias == pytest.approx(13 / 50 - 0.25)


def test_all_dropped_gives_header_only_table():
    design = small_design(truth=UlinfParams(alpha=1.0, p=0.5, theta=1.0), sample_sizes=[10], replications=5)
    report = run_simulation(design)
    assert report.cells == []
    assert report.dropped_replications == {10: 5}
    assert report_to_csv(report) == ",10\n"


def test_csv_table_layout():
    report = run_simulation(small_design())
    lines = report_to_csv(report).strip().splitlines()
    assert lines[0] == ",50,100"
    labels = [line.split(",")[0] for line in lines[1:]]
    assert labels == [label for label, _, _ in TABLE_ROWS]
    mse_e = next(line for line in lines if line.startswith("mse.E,"))
    assert float(mse_e.split(",")[1]) == report.cell(50, Estimand.MEAN).mse


def test_relative_rows_are_appended():
    report = run_simulation(small_design())
    lines = report_to_table(report, "csv", relative=True).strip().splitlines()
    assert lines[-1].startswith("RelBias.V,")
    assert len(lines) == 1 + len(TABLE_ROWS) + 5


def test_text_table_has_footer():
    text = report_to_text(run_simulation(small_design()))
    assert text.splitlines()[-1] == "mode=stratified replications=40 dropped=0"


def test_text_table_keeps_ten_significant_digits():
    report = run_simulation(small_design(sample_sizes=[50], replications=3))
    text = report_to_text(report)
    for estimand in (Estimand.THETA, Estimand.ALPHA):
        cell = report.cell(50, estimand)
        assert f"{cell.mean_estimate:.10g}" in text
        assert f"{cell.mse:.10g}" in text


def test_alpha_is_unbiased_in_mixture_mode():
    replications, n = 400, 100
    report = run_simulation(small_design(sample_sizes=[n], replications=replications, mode=SamplingMode.MIXTURE))
    cell = report.cell(n, Estimand.ALPHA)
    binomial_se = np.sqrt(0.25 * 0.75 / n / cell.replications_used)
    assert abs(cell.bias) < 3.0 * binomial_se


def test_mse_shrinks_with_sample_size():
    report = run_simulation(small_design(sample_sizes=[50, 1000], replications=200))
    for estimand in (Estimand.ALPHA, Estimand.THETA, Estimand.P, Estimand.MEAN, Estimand.VARIANCE):
        assert report.cell(1000, estimand).mse < report.cell(50, estimand).mse


@pytest.mark.slow
def test_standardized_theta_is_close_to_normal():
    n, theta = 1000, TRUTH.theta
    standardized = []
    for replication in range(400):
        values = ulinf_sample(n, TRUTH, replication_rng(11, n, replication), SamplingMode.MIXTURE)
        row = estimate_replication(values)
        nc = int(np.count_nonzero((values > 0.0) & (values < 1.0)))
        k_theta = nc * (2.0 / theta ** 2 - 1.0 / (1.0 + theta) ** 2)
        standardized.append((row[1] - theta) * np.sqrt(k_theta))
    result = anderson(np.array(standardized), dist="norm")
    # critical value at the 1% level
    assert result.statistic < result.critical_values[-1]
    assert abs(np.mean(standardized)) < 0.2
    assert np.std(standardized) == pytest.approx(1.0, abs=0.15)


@pytest.mark.slow
def test_estimates_near_truth_at_reported_sizes():
    report = run_simulation(SimDesign(truth=TRUTH, sample_sizes=[50, 1000], replications=10_000, seed=99, workers=4))
    assert report.cell(50, Estimand.P).mean_estimate == pytest.approx(0.3968, abs=0.006)
    assert report.cell(50, Estimand.THETA).mean_estimate == pytest.approx(1.5292, abs=0.01)
    assert report.cell(1000, Estimand.P).mean_estimate == pytest.approx(0.3996, abs=0.002)
    assert report.cell(1000, Estimand.THETA).mean_estimate == pytest.approx(1.5010, abs=0.004)
