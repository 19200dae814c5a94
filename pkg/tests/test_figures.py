import csv

import pytest

from noninf.bayes import jzs_log_bf
from noninf.distributions import ncf_cdf, ncf_sf
from noninf.figures import figure1_n_grid, region_boundary, region_rows, simulation_curve_rows, write_rows
from noninf.simulation import load_study, run_study, write_results_csv


def f_of(r2, n, k):
    return (r2 / k) / ((1 - r2) / (n - k - 1))


def test_grid_has_76_distinct_points():
    g = figure1_n_grid()
    assert len(g) == 76 and g[0] == 30 and g[-1] == 1000 and g == sorted(set(g))


@pytest.mark.parametrize("k, n", [(1, 40), (5, 120), (12, 300)])
def test_boundaries_are_level_sets(k, n):
    b = region_boundary(k, n, delta=0.10, alpha=0.05, threshold=3.0)
    df2 = n - k - 1
    assert ncf_sf(f_of(b.r2_nhst, n, k), k, df2) == pytest.approx(0.05, abs=1e-9)
    assert ncf_cdf(f_of(b.r2_noninf, n, k), k, df2, n * 0.1 / 0.9) == pytest.approx(0.05, abs=1e-9)
    assert jzs_log_bf(b.r2_bf_pos, n, k) == pytest.approx(1.0986122886681098, abs=1e-8)
    assert jzs_log_bf(b.r2_bf_neg, n, k) == pytest.approx(-1.0986122886681098, abs=1e-8)


def test_bf_negative_unreachable_for_one_covariate_at_small_n():
    assert region_boundary(1, 30).r2_bf_neg is None


def test_inconclusive_region_closes_for_five_covariates():
    assert region_boundary(5, 183).inconclusive_possible
    assert not region_boundary(5, 184).inconclusive_possible


def test_twelve_covariates_negative_above_margin_at_small_n():
    # R^2 is biased upward in small samples: CET can call R^2 > delta negative
    rows = region_rows((12,), n_grid=[30, 35, 40, 45, 49])
    assert all(min(r["r2_noninf"], r["r2_nhst"]) > 0.10 for r in rows)


def test_region_rows_csv(tmp_path):
    rows = region_rows((1,), n_grid=[30, 100])
    write_rows(rows, tmp_path / "r.csv")
    back = list(csv.DictReader(open(tmp_path / "r.csv")))
    assert len(back) == 2 and back[0]["r2_bf_neg"] == ""
    with pytest.raises(ValueError):
        write_rows([], tmp_path / "x.csv")


def test_simulation_curves(tmp_path):
    results = run_study(load_study("sim2.cfg", replicates=10).scenarios[:2])
    write_results_csv(results, tmp_path / "r.csv")
    rows = simulation_curve_rows(tmp_path / "r.csv", "agreement")
    assert len(rows) == 2 * 3 * 3 and "bf_negative" in rows[0]
    rows = simulation_curve_rows(tmp_path / "r.csv", "power")
    assert set(rows[0]) == {"k", "sigma_sq", "true_p2", "n_obs", "delta", "reject_rate", "reject_se", "power_formula"}
