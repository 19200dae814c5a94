"""Omnibus non-inferiority tests for R^2 (linear regression) and eta^2 (one-way ANOVA)."""

__version__ = "0.1.0"

from .bayes import BfResult, bf_decide, jzs_bf_regression  # noqa: E402
from .distributions import invert_ncp, ncf_cdf, ncf_quantile, ncf_sf  # noqa: E402
from .inference import (  # noqa: E402
    DecisionOutcome,
    Outcome,
    TestKind,
    TestResult,
    cet_decide,
    eta_sq_upper_ci,
    nhst_anova,
    nhst_regression,
    noninf_anova_hom,
    noninf_anova_welch,
    noninf_regression,
    power_noninf,
)
from .model_fit import (  # noqa: E402
    AnovaSummary,
    GroupSummary,
    RegressionSummary,
    anova_from_data,
    anova_from_summaries,
    fit_regression,
    regression_from_r2,
    welch_f,
)
