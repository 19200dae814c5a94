import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noninf.model_fit import fit_regression
from noninf.simulation import (
    BalancedBinaryDesign,
    ConfigError,
    Scenario,
    agreement_summary,
    load_study,
    read_results_csv,
    run_scenario,
    run_study,
    scenario_seed,
    simulate_dataset,
    true_p_squared,
    write_manifest,
    write_results_csv,
)

K2 = (0.0, 0.2, 0.3)
K4 = (0.0, 0.2, 0.2, -0.1, -0.2)


def scenario(**kw):
    base = dict(scenario_id="t", n_obs=64, design=BalancedBinaryDesign(2), beta=K2, sigma_sq=1.0,
                delta_grid=(0.05, 0.1), replicates=200, seed=12345)
    base.update(kw)
    return Scenario(**base)


# --- design and P^2 ---------------------------------------------------------------


@pytest.mark.parametrize("sigma_sq, expected", [(1.0, 0.031), (0.5, 0.061), (0.4, 0.075)])
def test_published_p2_two_covariates(sigma_sq, expected):
    assert round(true_p_squared(K2, BalancedBinaryDesign(2), sigma_sq), 3) == expected


@pytest.mark.parametrize("sigma_sq, expected", [(9.0, 0.004), (1.0, 0.031), (0.5, 0.061)])
def test_published_p2_four_covariates(sigma_sq, expected):
    assert round(true_p_squared(K4, BalancedBinaryDesign(4), sigma_sq), 3) == expected


def test_null_coefficients_give_zero():
    assert true_p_squared((1.0, 0.0, 0.0), BalancedBinaryDesign(2), 3.0) == 0.0


def test_p2_matches_covariance_form_on_balanced_rows():
    d = BalancedBinaryDesign(4)
    X = d.matrix(64)
    beta = np.array(K4[1:])
    v = beta @ np.cov(X, rowvar=False, bias=True) @ beta
    assert true_p_squared(K4, d, 1.0, 64) == pytest.approx(v / (v + 1.0), rel=1e-12)
    assert true_p_squared(K4, d, 1.0, 64) == pytest.approx(true_p_squared(K4, d, 1.0), rel=1e-12)


def test_round_robin_design_is_balanced_when_divisible():
    d = BalancedBinaryDesign(3)
    X = d.matrix(40)
    counts = np.unique(X, axis=0, return_counts=True)[1]
    assert counts.tolist() == [5] * 8
    assert np.allclose(np.corrcoef(X, rowvar=False), np.eye(3))
    assert d.balanced_n(45) == 40 and not d.is_balanced(45)


def test_unbalanced_p2_from_realized_rows():
    d = BalancedBinaryDesign(4)
    X = d.matrix(60)
    mean = X @ np.array(K4[1:])
    v = mean.var()
    assert true_p_squared(K4, d, 1.0, 60) == pytest.approx(v / (v + 1.0), rel=1e-12)


def test_design_validation():
    with pytest.raises(ConfigError):
        BalancedBinaryDesign(0)
    with pytest.raises(ConfigError):
        true_p_squared((0.0, 1.0), BalancedBinaryDesign(2), 1.0)
    with pytest.raises(ConfigError):
        true_p_squared(K2, BalancedBinaryDesign(2), 0.0)


@pytest.mark.parametrize(
    "kw",
    [dict(replicates=0), dict(beta=(0.0, 1.0)), dict(n_obs=3), dict(delta_grid=(0.0,)),
     dict(bf_thresholds=(1.0,)), dict(alpha=1.0), dict(seed=-1)],
)
def test_scenario_validation(kw):
    with pytest.raises(ConfigError):
        scenario(**kw)


# --- data generation ---------------------------------------------------------------


def test_dataset_is_deterministic_per_replicate():
    s = scenario()
    y1, X1 = simulate_dataset(s, 7)
    y2, X2 = simulate_dataset(s, 7)
    assert np.array_equal(y1, y2) and np.array_equal(X1, X2)
    assert not np.array_equal(y1, simulate_dataset(s, 8)[0])
    assert not np.array_equal(y1, simulate_dataset(replace(s, seed=54321), 7)[0])


def test_noiseless_limit_recovers_coefficients():
    s = scenario(sigma_sq=1e-12, n_obs=32)
    y, X = simulate_dataset(s, 0)
    coef, *_ = np.linalg.lstsq(np.column_stack([np.ones(32), X]), y, rcond=None)
    assert np.allclose(coef, K2, atol=1e-4)


def test_r2_biased_upward_at_null():
    s = scenario(design=BalancedBinaryDesign(4), beta=(0.0,) * 5, n_obs=60, replicates=5000)
    r = run_scenario(s)
    # E[R^2] = K / (N - 1) under the null
    assert r.mean_r2 == pytest.approx(4 / 59, rel=0.05)
    assert r.mean_r2 > 0.05


def test_engine_r2_matches_fit_regression():
    s = scenario(replicates=1, n_obs=50)
    y, X = simulate_dataset(s, 0)
    r = run_scenario(s)
    assert r.mean_r2 == pytest.approx(fit_regression(y, X).r_squared, rel=1e-10)


# --- aggregated results ------------------------------------------------------------


@pytest.fixture(scope="module")
def bf_result():
    s = scenario(n_obs=100, delta_grid=(0.01, 0.05, 0.1), bf_thresholds=(3.0, 10.0), replicates=300)
    return run_scenario(s)


def test_rate_triples_partition(bf_result):
    for triple in list(bf_result.cet_rates.values()) + list(bf_result.bf_rates.values()):
        assert sum(triple) == pytest.approx(1.0, abs=1e-12)
    c = bf_result.counts
    assert (c.cet.sum(axis=1) == c.ok).all() and (c.bf.sum(axis=1) == c.ok).all()


def test_cet_positive_equals_nhst_rate(bf_result):
    for pos, _, _ in bf_result.cet_rates.values():
        assert pos == bf_result.nhst_rate


def test_agreement_and_contradiction_are_consistent(bf_result):
    for key, agree in bf_result.agreement.items():
        contra = bf_result.contradiction[key]
        assert 0 <= contra <= 1 - agree + 1e-12


def test_rejection_rate_monotone_in_delta(bf_result):
    rates = [bf_result.rejection_rate_per_delta[d] for d in sorted(bf_result.rejection_rate_per_delta)]
    assert all(a <= b for a, b in zip(rates, rates[1:]))


def test_mc_se(bf_result):
    assert bf_result.mc_se == pytest.approx(math.sqrt(0.05 * 0.95 / 300))


def test_worker_count_does_not_change_results():
    scenarios = [scenario(replicates=130, seed=s) for s in (1, 2)]
    one = run_study(scenarios, workers=1, chunk_size=50)
    two = run_study(scenarios, workers=2, chunk_size=50)
    for a, b in zip(one, two):
        assert np.array_equal(a.counts.reject, b.counts.reject)
        assert np.array_equal(a.counts.cet, b.counts.cet)
        assert a.counts.sum_r2 == b.counts.sum_r2


def test_agreement_summary_is_replicate_weighted():
    a = run_scenario(scenario(replicates=100, bf_thresholds=(3.0,), seed=1))
    b = run_scenario(scenario(replicates=300, bf_thresholds=(3.0,), seed=2))
    agree, _ = agreement_summary([a, b], 0.05, 3.0)
    expected = (a.counts.agree[0, 0] + b.counts.agree[0, 0]) / 400
    assert agree == pytest.approx(expected)
    with pytest.raises(ValueError):
        agreement_summary([a], 0.33, 3.0)


# --- configs and files -------------------------------------------------------------


def test_presets_enumerate_the_studies():
    s1 = load_study("sim1.cfg")
    assert len(s1.scenarios) == 32 and s1.replicates == 5000
    assert all(len(s.delta_grid) >= 19 for s in s1.scenarios)
    assert load_study("sim1.cfg", full=True).replicates == 50000
    s2 = load_study("sim2.cfg")
    assert len(s2.scenarios) == 64 and s2.replicates == 1000
    assert set(s2.scenarios[0].bf_thresholds) == {3.0, 6.0, 10.0}
    assert len({s.seed for s in s2.scenarios}) == 64


def test_boundary_margin_added(tmp_path):
    for s in load_study("sim1.cfg").scenarios:
        if s.true_p_squared > 0:
            assert s.true_p_squared in s.delta_grid


def test_truncate_option(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("[study]\nseed = 1\nreplicates = 10\ndelta_grid = 0.1\nbalance = truncate\n"
                   "[design a]\nk = 4\nbeta = 0 .2 .2 -.1 -.2\nsigma_sq = 1\nn_obs = 60, 64\n")
    st_ = load_study(cfg)
    assert [s.n_obs for s in st_.scenarios] == [48, 64]
    assert [s.n_requested for s in st_.scenarios] == [60, 64]
    assert any("truncated" in a for a in st_.adjustments)


@pytest.mark.parametrize(
    "text",
    [
        "[design a]\nk = 2\nbeta = 0 1 1\nsigma_sq = 1\nn_obs = 20\n",
        "[study]\nreplicates = 10\n[design a]\nk = 2\nbeta = 0 1 1\nsigma_sq = 1\nn_obs = 20\n",
        "[study]\nseed = 1\n",
        "[study]\nseed = 1\n[design a]\nk = 2\nbeta = 0 1\nsigma_sq = 1\nn_obs = 20\n",
        "[study]\nseed = 1\n[design a]\nk = 2\nbeta = 0 1 1\nsigma_sq = 1\nn_obs = 20.5\n",
        "[study]\nseed = 1\nbalance = sideways\n[design a]\nk = 2\nbeta = 0 1 1\nsigma_sq = 1\nn_obs = 20\n",
        "not a config",
    ],
)
def test_bad_configs(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        load_study(cfg)


def test_missing_config():
    with pytest.raises(ConfigError):
        load_study("no-such-study.cfg")


def test_csv_round_trip_and_manifest(tmp_path):
    study = load_study("sim2.cfg", replicates=20)
    scen = study.scenarios[:2]
    results = run_study(scen)
    write_results_csv(results, tmp_path / "r.csv")
    back = read_results_csv(tmp_path / "r.csv")
    for a, b in zip(results, back):
        for name in ("reject", "cet", "cet_snm", "bf", "agree", "contra"):
            assert np.array_equal(getattr(a.counts, name), getattr(b.counts, name))
        assert a.counts.nhst_reject == b.counts.nhst_reject
    m = write_manifest(replace(study, scenarios=tuple(scen)), results, tmp_path / "m.json")
    assert m["scenarios"][0]["seed"] == scen[0].seed and m["version"]


def test_scenario_seeds_are_stable():
    assert scenario_seed(20190531, 0) == scenario_seed(20190531, 0)
    assert scenario_seed(20190531, 0) != scenario_seed(20190531, 1)
    assert 0 <= scenario_seed(1, 2) < 2**64


@given(st.integers(1, 5), st.integers(2, 200))
def test_matrix_shape_and_cell_counts(k, n):
    d = BalancedBinaryDesign(k)
    X = d.matrix(n)
    assert X.shape == (n, k)
    counts = np.unique(X, axis=0, return_counts=True)[1]
    assert counts.max() - counts.min() <= 1
