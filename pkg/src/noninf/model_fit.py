"""Sufficient statistics for the regression and one-way ANOVA tests.

Everything downstream needs only (N, K, R^2, F) for regression and per-group
(n, mean, sd) for ANOVA, so raw data is reduced to these summaries first.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "AnovaSummary",
    "GroupSummary",
    "InputError",
    "RankDeficientError",
    "RegressionSummary",
    "WelchUnavailableWarning",
    "anova_from_data",
    "anova_from_summaries",
    "fit_regression",
    "regression_from_r2",
    "summarize_groups",
    "welch_f",
]


class InputError(ValueError):
    """Data or summaries that cannot be analysed."""


class RankDeficientError(InputError):
    """The design matrix (with intercept) does not have full column rank."""


class WelchUnavailableWarning(UserWarning):
    """Welch quantities were skipped: some group has n < 2 or zero variance."""


def _f_from_r2(r2: float, n_obs: int, k: int) -> float:
    if r2 >= 1.0:
        return math.inf
    return (r2 / k) / ((1.0 - r2) / (n_obs - k - 1))


@dataclass(frozen=True)
class RegressionSummary:
    """Sample size, number of predictors, R^2 and the overall F statistic.

    ``perfect_fit`` marks R^2 == 1, where F is reported as ``inf``.
    """

    n_obs: int
    n_predictors: int
    r_squared: float
    f_stat: float
    perfect_fit: bool = False

    def __post_init__(self):
        if self.n_predictors < 1:
            raise InputError("need at least one predictor")
        if self.n_obs <= self.n_predictors + 1:
            raise InputError(f"need N > K + 1, got N={self.n_obs}, K={self.n_predictors}")
        if not (0.0 <= self.r_squared <= 1.0):
            raise InputError(f"R^2 must lie in [0, 1], got {self.r_squared}")
        if self.f_stat < 0 or math.isnan(self.f_stat):
            raise InputError(f"F must be non-negative, got {self.f_stat}")

    @property
    def df1(self) -> int:
        return self.n_predictors

    @property
    def df2(self) -> int:
        return self.n_obs - self.n_predictors - 1


def regression_from_r2(r_squared: float, n_obs: int, n_predictors: int) -> RegressionSummary:
    """Build a summary from a reported R^2, deriving F."""
    if not (0.0 <= r_squared <= 1.0):
        raise InputError(f"R^2 must lie in [0, 1], got {r_squared}")
    if n_obs <= n_predictors + 1:
        raise InputError(f"need N > K + 1, got N={n_obs}, K={n_predictors}")
    f_stat = _f_from_r2(r_squared, n_obs, n_predictors)
    return RegressionSummary(n_obs, n_predictors, float(r_squared), f_stat, perfect_fit=r_squared >= 1.0)


def fit_regression(y, X) -> RegressionSummary:
    """Least-squares fit of ``y`` on ``X`` plus an intercept.

    Parameters
    ----------
    y : array_like, shape (N,)
    X : array_like, shape (N, K)
        Covariates without the intercept column.

    Returns
    -------
    RegressionSummary

    Raises
    ------
    InputError
        If N <= K + 1 or inputs are not finite.
    RankDeficientError
        If ``[1, X]`` is rank deficient.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise InputError(f"shape mismatch: y {y.shape}, X {X.shape}")
    n_obs, k = X.shape
    if k < 1:
        raise InputError("need at least one covariate")
    if n_obs <= k + 1:
        raise InputError(f"need N > K + 1, got N={n_obs}, K={k}")
    if not (np.isfinite(y).all() and np.isfinite(X).all()):
        raise InputError("non-finite values in y or X")

    design = np.column_stack([np.ones(n_obs), X])
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= diag.max() * n_obs * np.finfo(float).eps * 10:
        raise RankDeficientError("design matrix with intercept is rank deficient")

    y_bar = math.fsum(y) / n_obs
    centred = y - y_bar
    ss_tot = math.fsum(centred * centred)
    if ss_tot == 0.0:
        return RegressionSummary(n_obs, k, 0.0, 0.0)
    resid = y - q @ (q.T @ y)
    ss_res = math.fsum(resid * resid)
    scale = np.finfo(float).eps * n_obs * max(float(np.max(np.abs(y))), 1.0)
    if ss_res <= 100 * scale * scale:
        return RegressionSummary(n_obs, k, 1.0, math.inf, perfect_fit=True)
    r2 = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    return RegressionSummary(n_obs, k, r2, _f_from_r2(r2, n_obs, k))


@dataclass(frozen=True)
class GroupSummary:
    n: int
    mean: float
    sd: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"group size must be >= 1, got {self.n}")
        if not math.isfinite(self.mean):
            raise InputError("group mean must be finite")
        if self.sd is not None:
            if not math.isfinite(self.sd) or self.sd < 0:
                raise InputError(f"group sd must be finite and >= 0, got {self.sd}")
            if self.n < 2 and self.sd != 0:
                raise InputError("a group with n = 1 has no sample sd")
        elif self.n >= 2:
            raise InputError("groups with n >= 2 need an sd")

    @property
    def var(self) -> float:
        return 0.0 if self.sd is None else self.sd * self.sd


@dataclass(frozen=True)
class AnovaSummary:
    """One-way ANOVA sums of squares, F, Welch F' and effect-size estimates.

    ``welch_f`` and ``welch_df2`` are ``None`` when some group has n < 2 or a
    zero sample variance.  ``epsilon_sq_hat`` and ``omega_sq_hat`` are not
    clamped; ``negative_estimates`` flags when either is below zero.
    """

    groups: tuple[GroupSummary, ...]
    ss_between: float
    ss_within: float
    f_stat: float
    welch_f: float | None
    welch_df2: float | None
    eta_sq_hat: float
    epsilon_sq_hat: float
    omega_sq_hat: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_obs(self) -> int:
        return sum(g.n for g in self.groups)

    @property
    def df_between(self) -> int:
        return self.n_groups - 1

    @property
    def df_within(self) -> int:
        return self.n_obs - self.n_groups

    @property
    def ss_total(self) -> float:
        return self.ss_between + self.ss_within

    @property
    def ms_within(self) -> float:
        return self.ss_within / self.df_within

    @property
    def welch_available(self) -> bool:
        return self.welch_f is not None

    @property
    def negative_estimates(self) -> bool:
        return self.epsilon_sq_hat < 0 or self.omega_sq_hat < 0

    def as_regression(self) -> RegressionSummary:
        """The same data seen as a dummy-coded regression with K = J - 1."""
        return RegressionSummary(
            self.n_obs, self.df_between, self.eta_sq_hat, self.f_stat,
            perfect_fit=math.isinf(self.f_stat),
        )


def welch_f(groups: Sequence[GroupSummary]) -> tuple[float, float]:
    """Welch's heteroscedastic F' and its denominator degrees of freedom.

    With weights w_j = n_j / s_j^2, W = sum w_j and weighted mean
    m' = sum w_j mean_j / W::

        F'  = [sum w_j (mean_j - m')^2 / (J - 1)] / [1 + 2 (J-2)/(J^2-1) * L]
        df' = (J^2 - 1) / (3 L),   L = sum (1 - w_j / W)^2 / (n_j - 1)
    """
    groups = list(groups)
    j = len(groups)
    if j < 2:
        raise InputError("need at least two groups")
    if any(g.n < 2 for g in groups):
        raise InputError("Welch F' needs n >= 2 in every group")
    if any(g.var == 0.0 for g in groups):
        raise InputError("Welch F' is undefined when a group has zero sample variance")
    w = [g.n / g.var for g in groups]
    w_tot = math.fsum(w)
    m_prime = math.fsum(wi * g.mean for wi, g in zip(w, groups)) / w_tot
    between = math.fsum(wi * (g.mean - m_prime) ** 2 for wi, g in zip(w, groups)) / (j - 1)
    lam = math.fsum((1.0 - wi / w_tot) ** 2 / (g.n - 1) for wi, g in zip(w, groups))
    f_prime = between / (1.0 + 2.0 * (j - 2) / (j * j - 1) * lam)
    df_prime = (j * j - 1) / (3.0 * lam) if lam > 0 else math.inf
    return f_prime, df_prime


def anova_from_summaries(groups: Sequence[GroupSummary]) -> AnovaSummary:
    """One-way ANOVA from per-group (n, mean, sd).

    Examples
    --------
    >>> a = anova_from_summaries([GroupSummary(3, 1.0, 1.0), GroupSummary(3, 2.0, 1.0)])
    >>> round(a.f_stat, 6)
    1.5
    """
    groups = tuple(groups)
    j = len(groups)
    if j < 2:
        raise InputError("ANOVA needs at least two groups")
    n_obs = sum(g.n for g in groups)
    if n_obs <= j:
        raise InputError(f"need N > J, got N={n_obs}, J={j}")

    grand = math.fsum(g.n * g.mean for g in groups) / n_obs
    ss_b = math.fsum(g.n * (g.mean - grand) ** 2 for g in groups)
    ss_w = math.fsum((g.n - 1) * g.var for g in groups)
    ss_t = ss_b + ss_w
    df_b, df_w = j - 1, n_obs - j
    ms_w = ss_w / df_w
    if ss_w == 0.0:
        f_stat = math.inf if ss_b > 0 else 0.0
    else:
        f_stat = (ss_b / df_b) / ms_w
    if ss_t == 0.0:
        eta = eps = omega = 0.0
    else:
        eta = ss_b / ss_t
        eps = (ss_b - df_b * ms_w) / ss_t
        omega = (ss_b - df_b * ms_w) / (ss_t + ms_w)

    notes = []
    try:
        wf, wdf = welch_f(groups)
    except InputError as exc:
        wf = wdf = None
        notes.append(f"Welch F' unavailable: {exc}")
        warnings.warn(str(exc), WelchUnavailableWarning, stacklevel=2)
    if eps < 0 or omega < 0:
        notes.append("epsilon^2 / omega^2 estimate is negative (reported unclamped)")
    return AnovaSummary(groups, ss_b, ss_w, f_stat, wf, wdf, eta, eps, omega, tuple(notes))


def summarize_groups(y, labels) -> list[GroupSummary]:
    """Reduce raw observations to per-group summaries, in order of first appearance."""
    y = np.asarray(y, dtype=float)
    labels = np.asarray(labels)
    if y.shape != labels.shape or y.ndim != 1:
        raise InputError("y and group labels must be 1-d and equal length")
    if not np.isfinite(y).all():
        raise InputError("non-finite outcome values")
    _, first = np.unique(labels, return_index=True)
    out = []
    for level in labels[np.sort(first)]:
        values = y[labels == level]
        n = values.size
        mean = math.fsum(values) / n
        sd = math.sqrt(math.fsum((values - mean) ** 2) / (n - 1)) if n > 1 else None
        out.append(GroupSummary(n, mean, sd))
    return out


def anova_from_data(y, labels) -> AnovaSummary:
    return anova_from_summaries(summarize_groups(y, labels))
