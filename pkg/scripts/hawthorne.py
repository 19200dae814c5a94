#!/usr/bin/env python3
"""Worked example: three trial arms summarised by (n, mean, sd) of the
change score, analysed by ANOVA, as a K = 2 regression, with Welch's F'
and with the Bayes factor."""

from noninf import (
    GroupSummary,
    anova_from_summaries,
    bf_decide,
    cet_decide,
    eta_sq_upper_ci,
    jzs_bf_regression,
    nhst_anova,
    nhst_regression,
    noninf_anova_hom,
    noninf_anova_welch,
    noninf_regression,
    regression_from_r2,
)

ARMS = [GroupSummary(1483, -5.13, 24.56), GroupSummary(1532, -5.64, 21.77), GroupSummary(1565, -4.79, 25.17)]
DELTA = 0.01


def main():
    a = anova_from_summaries(ARMS)
    print(f"SS_b = {a.ss_between:.2f}  SS_w = {a.ss_within:.1f}  F = {a.f_stat:.4f}  eta2 = {a.eta_sq_hat:.6f}")
    print(f"eps2 = {a.epsilon_sq_hat:.6f}  omega2 = {a.omega_sq_hat:.6f}")

    nhst, ni = nhst_anova(a), noninf_anova_hom(a, DELTA)
    upper = eta_sq_upper_ci(a.f_stat, a.df_between, a.df_within, a.n_obs)
    print(f"ANOVA      p_nhst = {nhst.p_value:.3f}  p_noninf = {ni.p_value:.3e}  "
          f"eta2_u = {upper:.5f}  -> {cet_decide(nhst.p_value, ni.p_value).label.value}")

    reg = a.as_regression()
    print(f"regression p_nhst = {nhst_regression(reg).p_value:.3f}  "
          f"p_noninf = {noninf_regression(reg, DELTA).p_value:.3e}")

    w = noninf_anova_welch(a, DELTA)
    print(f"Welch      F' = {a.welch_f:.4f}  df' = {a.welch_df2:.1f}  p_noninf = {w.p_value:.3e}")

    rounded = regression_from_r2(0.000216, 4580, 2)
    print(f"R2 = 0.000216: F = {rounded.f_stat:.4f}  p_noninf = {noninf_regression(rounded, DELTA).p_value:.3e}")
    bf = jzs_bf_regression(rounded)
    print(f"JZS BF10 = {bf.bf10:.5f} -> {bf_decide(bf).label.value}")


if __name__ == "__main__":
    main()
