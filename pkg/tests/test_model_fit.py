import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from noninf.model_fit import (
    GroupSummary,
    InputError,
    RankDeficientError,
    WelchUnavailableWarning,
    anova_from_data,
    anova_from_summaries,
    fit_regression,
    regression_from_r2,
    summarize_groups,
    welch_f,
)

HAWTHORNE = [GroupSummary(1483, -5.13, 24.56), GroupSummary(1532, -5.64, 21.77), GroupSummary(1565, -4.79, 25.17)]


def groups_with_exact_moments(specs, seed=0):
    """Raw samples whose mean and sd equal the given summaries exactly."""
    rng = np.random.default_rng(seed)
    y, labels = [], []
    for j, (n, mean, sd) in enumerate(specs):
        e = rng.standard_normal(n)
        e = (e - e.mean()) / e.std(ddof=1)
        y.append(mean + sd * e)
        labels += [f"g{j}"] * n
    return np.concatenate(y), np.array(labels)


# --- regression ------------------------------------------------------------------


def test_fit_matches_lstsq_oracle():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(80, 3))
    y = X @ [0.5, -0.2, 0.0] + rng.normal(size=80)
    s = fit_regression(y, X)
    A = np.column_stack([np.ones(80), X])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r2 = 1 - np.sum((y - A @ coef) ** 2) / np.sum((y - y.mean()) ** 2)
    assert s.r_squared == pytest.approx(r2, rel=1e-12)
    assert s.f_stat == pytest.approx((r2 / 3) / ((1 - r2) / 76), rel=1e-10)
    assert (s.df1, s.df2) == (3, 76)


def test_regression_from_r2_inverts_f():
    s = regression_from_r2(0.2, 50, 4)
    assert s.f_stat == pytest.approx((0.2 / 4) / (0.8 / 45))


def test_rank_deficient_design():
    x = np.arange(10.0)
    with pytest.raises(RankDeficientError):
        fit_regression(np.arange(10.0) ** 2, np.column_stack([x, 2 * x]))
    with pytest.raises(RankDeficientError):
        fit_regression(np.arange(10.0), np.ones(10))


def test_perfect_fit_and_constant_outcome():
    x = np.arange(10.0)
    s = fit_regression(3 * x + 1, x)
    assert s.perfect_fit and s.r_squared == 1.0 and math.isinf(s.f_stat)
    c = fit_regression(np.full(10, 2.0), x)
    assert c.r_squared == 0.0 and c.f_stat == 0.0


@pytest.mark.parametrize("n, k", [(3, 2), (2, 1)])
def test_too_few_observations(n, k):
    with pytest.raises(InputError):
        fit_regression(np.arange(float(n)), np.random.default_rng(0).normal(size=(n, k)))


def test_nonfinite_input():
    with pytest.raises(InputError):
        fit_regression([1.0, 2.0, math.nan, 4.0], [1.0, 0.0, 1.0, 3.0])


def test_r2_out_of_range():
    for r2 in (-0.1, 1.1):
        with pytest.raises(InputError):
            regression_from_r2(r2, 30, 2)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(10, 60))
def test_r2_in_unit_interval_and_invariant_to_affine_y(seed, k, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, k))
    y = rng.normal(size=n) + X[:, 0]
    s = fit_regression(y, X)
    assert 0.0 <= s.r_squared <= 1.0
    t = fit_regression(-3.0 * y + 7.0, X)
    assert t.r_squared == pytest.approx(s.r_squared, rel=1e-9, abs=1e-12)


# --- ANOVA ------------------------------------------------------------------------


def test_hawthorne_sums_of_squares():
    a = anova_from_summaries(HAWTHORNE)
    assert a.n_obs == 4580 and a.df_between == 2 and a.df_within == 4577
    assert a.ss_within == pytest.approx(1482 * 24.56**2 + 1531 * 21.77**2 + 1564 * 25.17**2)
    assert a.ss_between == pytest.approx(565.826, abs=1e-3)
    assert a.f_stat == pytest.approx(0.49606, abs=1e-5)
    assert a.eta_sq_hat == pytest.approx(0.000216, abs=2e-6)
    # small effect: the less biased estimators go negative and are kept that way
    assert a.epsilon_sq_hat < 0 and a.omega_sq_hat < 0 and a.negative_estimates


def test_anova_matches_scipy_f_oneway():
    rng = np.random.default_rng(4)
    samples = [rng.normal(m, s, n) for m, s, n in [(0, 1, 12), (0.4, 1.5, 20), (1.0, 0.7, 9)]]
    y = np.concatenate(samples)
    labels = np.repeat(["a", "b", "c"], [12, 20, 9])
    a = anova_from_data(y, labels)
    ref = stats.f_oneway(*samples)
    assert a.f_stat == pytest.approx(ref.statistic, rel=1e-12)


def test_welch_matches_statsmodels_oracle():
    oneway = pytest.importorskip("statsmodels.stats.oneway")
    rng = np.random.default_rng(5)
    samples = [rng.normal(m, s, n) for m, s, n in [(0, 1, 12), (0.4, 3, 20), (1.0, 0.5, 9), (0.2, 2, 30)]]
    groups = summarize_groups(np.concatenate(samples), np.repeat(list("abcd"), [12, 20, 9, 30]))
    f, df = welch_f(groups)
    ref = oneway.anova_oneway(samples, use_var="unequal", welch_correction=True)
    assert f == pytest.approx(ref.statistic, rel=1e-10)
    assert df == pytest.approx(ref.df[1], rel=1e-10)


def test_welch_two_groups_is_squared_welch_t():
    rng = np.random.default_rng(6)
    a, b = rng.normal(0, 1, 15), rng.normal(0.5, 2.5, 22)
    groups = summarize_groups(np.concatenate([a, b]), np.repeat([0, 1], [15, 22]))
    f, df = welch_f(groups)
    t = stats.ttest_ind(a, b, equal_var=False)
    assert f == pytest.approx(t.statistic**2, rel=1e-10)
    assert df == pytest.approx(t.df, rel=1e-10)


def test_welch_unavailable_is_signalled():
    groups = [GroupSummary(1, 0.0), GroupSummary(5, 1.0, 1.0), GroupSummary(5, 2.0, 1.0)]
    with pytest.warns(WelchUnavailableWarning):
        a = anova_from_summaries(groups)
    assert not a.welch_available and a.welch_f is None and a.welch_df2 is None
    assert any("Welch" in w for w in a.warnings)
    with pytest.warns(WelchUnavailableWarning):
        b = anova_from_summaries([GroupSummary(4, 0.0, 0.0), GroupSummary(4, 1.0, 1.0)])
    assert not b.welch_available


def test_welch_equal_variance_limit():
    # identical n_j and s_j: F' = F / (1 + 2(J-2)/(J^2-1) * L), L = J (1-1/J)^2 / (n-1)
    n, j = 40, 4
    groups = [GroupSummary(n, m, 2.0) for m in (0.0, 0.3, -0.2, 0.5)]
    a = anova_from_summaries(groups)
    lam = j * (1 - 1 / j) ** 2 / (n - 1)
    assert a.welch_f == pytest.approx(a.f_stat / (1 + 2 * (j - 2) / (j * j - 1) * lam), rel=1e-12)
    assert a.welch_df2 == pytest.approx((j * j - 1) / (3 * lam), rel=1e-12)


def test_summary_and_raw_paths_agree():
    specs = [(30, 1.0, 2.0), (25, 1.8, 1.5), (41, 0.6, 3.0)]
    y, labels = groups_with_exact_moments(specs)
    raw = anova_from_data(y, labels)
    summ = anova_from_summaries([GroupSummary(*s) for s in specs])
    for attr in ("ss_between", "ss_within", "f_stat", "welch_f", "welch_df2", "eta_sq_hat"):
        assert getattr(raw, attr) == pytest.approx(getattr(summ, attr), rel=1e-9)


def test_anova_as_dummy_coded_regression():
    y, labels = groups_with_exact_moments([(20, 0.0, 1.0), (25, 0.5, 1.2), (30, -0.3, 0.8)], seed=7)
    a = anova_from_data(y, labels)
    X = np.column_stack([(labels == g).astype(float) for g in ("g1", "g2")])
    r = fit_regression(y, X)
    assert r.r_squared == pytest.approx(a.eta_sq_hat, rel=1e-10)
    assert r.f_stat == pytest.approx(a.f_stat, rel=1e-10)
    reg = a.as_regression()
    assert (reg.df1, reg.df2) == (r.df1, r.df2)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=0, mean=0.0), dict(n=3, mean=math.nan, sd=1.0), dict(n=3, mean=0.0, sd=-1.0), dict(n=3, mean=0.0)],
)
def test_group_summary_validation(kwargs):
    with pytest.raises(InputError):
        GroupSummary(**kwargs)


def test_anova_needs_two_groups_and_residual_df():
    with pytest.raises(InputError):
        anova_from_summaries([GroupSummary(5, 0.0, 1.0)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(InputError):
            anova_from_summaries([GroupSummary(1, 0.0), GroupSummary(1, 1.0)])


@given(
    st.lists(
        st.tuples(st.integers(2, 40), st.floats(-5, 5), st.floats(0.1, 5)), min_size=2, max_size=6
    )
)
def test_anova_invariants(specs):
    a = anova_from_summaries([GroupSummary(*s) for s in specs])
    assert a.ss_between >= 0 and a.ss_within > 0
    assert 0.0 <= a.eta_sq_hat <= 1.0
    assert a.epsilon_sq_hat <= a.eta_sq_hat + 1e-15
    # same numerator, larger denominator
    assert abs(a.omega_sq_hat) <= abs(a.epsilon_sq_hat) + 1e-15
    assert (a.omega_sq_hat < 0) == (a.epsilon_sq_hat < 0)
    assert a.f_stat == pytest.approx((a.ss_between / a.df_between) / a.ms_within, rel=1e-12)
    assert a.welch_f >= 0 and a.welch_df2 > 0
