"""Omnibus F tests: the usual NHST and the non-inferiority test for P^2 / eta^2.

The non-inferiority null is ``effect >= delta``; at its boundary the F
statistic is non-central F with ``ncp = N delta / (1 - delta)``, so the
p-value is the lower-tail CDF at the observed F.  Rejection is always the
strict ``p < alpha``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .distributions import (
    DomainError,
    flush_underflow,
    invert_ncp,
    ncf_cdf,
    ncf_quantile,
    ncf_sf,
)
from .model_fit import AnovaSummary, InputError, RegressionSummary

__all__ = [
    "DecisionOutcome",
    "Design",
    "Outcome",
    "TestKind",
    "TestResult",
    "cet_decide",
    "eta_sq_upper_ci",
    "inconclusive_possible",
    "nhst_anova",
    "nhst_regression",
    "noninf_anova_hom",
    "noninf_anova_welch",
    "noninf_ncp",
    "noninf_regression",
    "power_noninf",
]


class TestKind(str, enum.Enum):
    __test__ = False

    REGRESSION_NHST = "RegressionNHST"
    REGRESSION_NONINF = "RegressionNonInf"
    ANOVA_NHST = "AnovaNHST"
    ANOVA_WELCH_NHST = "AnovaWelchNHST"
    ANOVA_NONINF_HOM = "AnovaNonInfHom"
    ANOVA_NONINF_WELCH = "AnovaNonInfWelch"

    @property
    def is_noninferiority(self) -> bool:
        return self in (TestKind.REGRESSION_NONINF, TestKind.ANOVA_NONINF_HOM, TestKind.ANOVA_NONINF_WELCH)


class Design(str, enum.Enum):
    REGRESSION = "regression"
    ANOVA = "anova"


class Outcome(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    df1: float
    df2: float
    ncp_used: float
    p_value: float
    test_kind: TestKind
    alpha: float = 0.05
    delta: float | None = None
    underflow: bool = False

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p-value out of range: {self.p_value}")
        if (self.delta is not None) != self.test_kind.is_noninferiority:
            raise ValueError("delta must be given exactly for non-inferiority tests")

    @property
    def reject(self) -> bool:
        return self.p_value < self.alpha

    def as_dict(self) -> dict:
        return {
            "test": self.test_kind.value,
            "F": self.statistic,
            "df1": self.df1,
            "df2": self.df2,
            "ncp": self.ncp_used,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "delta": self.delta,
            "reject": self.reject,
            "underflow": self.underflow,
        }


@dataclass(frozen=True)
class DecisionOutcome:
    label: Outcome
    significant_yet_not_meaningful: bool = False

    def __post_init__(self):
        if self.significant_yet_not_meaningful and self.label is not Outcome.POSITIVE:
            raise ValueError("'significant yet not meaningful' only applies to a positive finding")


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def _check_delta(delta: float) -> None:
    if not (0.0 < delta < 1.0) or math.isnan(delta):
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")


def noninf_ncp(n_obs: float, delta: float) -> float:
    """Non-centrality at the null boundary, ``N delta / (1 - delta)``."""
    _check_delta(delta)
    return n_obs * delta / (1.0 - delta)


def _upper(stat: float, df1: float, df2: float, kind: TestKind, alpha: float) -> TestResult:
    p = 0.0 if math.isinf(stat) else ncf_sf(stat, df1, df2, 0.0)
    p, flag = flush_underflow(p)
    return TestResult(stat, df1, df2, 0.0, p, kind, alpha, underflow=flag)


def _lower(stat: float, df1: float, df2: float, n_obs: float, delta: float,
           kind: TestKind, alpha: float) -> TestResult:
    ncp = noninf_ncp(n_obs, delta)
    p = 1.0 if math.isinf(stat) else ncf_cdf(stat, df1, df2, ncp)
    p, flag = flush_underflow(p)
    return TestResult(stat, df1, df2, ncp, p, kind, alpha, delta, flag)


def nhst_regression(s: RegressionSummary, alpha: float = 0.05) -> TestResult:
    """Overall F test of H0: P^2 = 0."""
    _check_alpha(alpha)
    return _upper(s.f_stat, s.df1, s.df2, TestKind.REGRESSION_NHST, alpha)


def noninf_regression(s: RegressionSummary, delta: float, alpha: float = 0.05) -> TestResult:
    """Non-inferiority test of H0: P^2 >= delta against H1: P^2 < delta.

    Examples
    --------
    >>> from noninf.model_fit import regression_from_r2
    >>> r = noninf_regression(regression_from_r2(0.000216, 4580, 2), 0.01)
    >>> f"{r.p_value:.3g}"
    '1.13e-09'
    """
    _check_alpha(alpha)
    return _lower(s.f_stat, s.df1, s.df2, s.n_obs, delta, TestKind.REGRESSION_NONINF, alpha)


def nhst_anova(a: AnovaSummary, alpha: float = 0.05, welch: bool = False) -> TestResult:
    _check_alpha(alpha)
    if welch:
        if not a.welch_available:
            raise InputError("Welch statistics are unavailable for these groups")
        return _upper(a.welch_f, a.df_between, a.welch_df2, TestKind.ANOVA_WELCH_NHST, alpha)
    return _upper(a.f_stat, a.df_between, a.df_within, TestKind.ANOVA_NHST, alpha)


def noninf_anova_hom(a: AnovaSummary, delta: float, alpha: float = 0.05) -> TestResult:
    """Non-inferiority test for eta^2 assuming equal within-group variances."""
    _check_alpha(alpha)
    return _lower(a.f_stat, a.df_between, a.df_within, a.n_obs, delta, TestKind.ANOVA_NONINF_HOM, alpha)


def noninf_anova_welch(a: AnovaSummary, delta: float, alpha: float = 0.05) -> TestResult:
    """Heteroscedastic variant: Welch's F' referred to F(J-1, df', N delta/(1-delta)).

    The tested effect is the weighted-mean version eta^2' (weights n_j / sigma_j^2),
    which coincides with eta^2 under equal variances.
    """
    _check_alpha(alpha)
    if not a.welch_available:
        raise InputError("Welch statistics are unavailable for these groups")
    return _lower(a.welch_f, a.df_between, a.welch_df2, a.n_obs, delta, TestKind.ANOVA_NONINF_WELCH, alpha)


def _dfs(n_obs: int, k_or_j: int, kind: Design) -> tuple[int, int]:
    kind = Design(kind)
    if kind is Design.REGRESSION:
        df1, df2 = k_or_j, n_obs - k_or_j - 1
    else:
        df1, df2 = k_or_j - 1, n_obs - k_or_j
    if df1 < 1 or df2 < 1:
        raise DomainError(f"no degrees of freedom left for N={n_obs}, {kind.value} size {k_or_j}")
    return df1, df2


def power_noninf(n_obs: int, k_or_j: int, delta: float, alpha: float = 0.05,
                 kind: Design | str = Design.REGRESSION) -> float:
    """Approximate power of the non-inferiority test when the true effect is 0.

    ``F*`` is the alpha-quantile of F(df1, df2, N delta/(1-delta)); power is the
    central-F probability of falling below it.  ``k_or_j`` is K for regression
    and J for ANOVA.
    """
    _check_alpha(alpha)
    df1, df2 = _dfs(n_obs, k_or_j, kind)
    f_star = ncf_quantile(alpha, df1, df2, noninf_ncp(n_obs, delta))
    return ncf_cdf(f_star, df1, df2, 0.0)


def inconclusive_possible(n_obs: int, k_or_j: int, delta: float, alpha: float = 0.05,
                          kind: Design | str = Design.REGRESSION) -> bool:
    """Whether some F gives both p_nhst >= alpha and p_noninf >= alpha."""
    _check_alpha(alpha)
    df1, df2 = _dfs(n_obs, k_or_j, kind)
    f_noninf = ncf_quantile(alpha, df1, df2, noninf_ncp(n_obs, delta))
    f_nhst = ncf_quantile(1.0 - alpha, df1, df2, 0.0)
    return f_noninf <= f_nhst


def eta_sq_upper_ci(f_stat: float, df1: float, df2: float, n_obs: float, alpha: float = 0.05) -> float:
    """Upper limit of the one-sided (1 - alpha) interval [0, upper] for eta^2 (or P^2).

    The non-centrality bound solves ``cdf(F; df1, df2, ncp_u) = alpha`` and maps
    to ``ncp_u / (ncp_u + N)``.
    """
    _check_alpha(alpha)
    if f_stat == 0.0:
        return 0.0
    if math.isinf(f_stat):
        return 1.0
    ncp_u = invert_ncp(f_stat, df1, df2, alpha)
    return ncp_u / (ncp_u + n_obs)


def cet_decide(p_nhst: float, p_noninf: float, alpha: float = 0.05) -> DecisionOutcome:
    """Conditional equivalence testing decision.

    NHST first: ``p_nhst < alpha`` is a positive finding (also flagged
    "significant yet not meaningful" when ``p_noninf < alpha``).  Otherwise
    ``p_noninf < alpha`` is negative, and anything else inconclusive.
    """
    if p_nhst < alpha:
        return DecisionOutcome(Outcome.POSITIVE, p_noninf < alpha)
    if p_noninf < alpha:
        return DecisionOutcome(Outcome.NEGATIVE)
    return DecisionOutcome(Outcome.INCONCLUSIVE)
