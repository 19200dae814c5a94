"""Default (JZS) Bayes factor for a full regression model against the
intercept-only model, computed from (R^2, N, K).

With a Zellner-Siow mixture prior, g ~ InvGamma(1/2, N r^2 / 2), the Bayes
factor is a one-dimensional integral

    BF10 = int_0^inf (1 + g)^((N-K-1)/2) (1 + g (1 - R^2))^(-(N-1)/2) p(g) dg.

The integrand spans hundreds of orders of magnitude for N in the thousands,
so it is evaluated in logs, rescaled by its value at the mode, and integrated
over u = log g with adaptive quadrature, split at multiples of the peak width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, optimize, special

from ._constants import RSCALE_PRESETS
from .inference import DecisionOutcome, Outcome
from .model_fit import InputError, RegressionSummary

__all__ = ["BfResult", "QuadratureError", "bf_decide", "jzs_bf_regression", "jzs_log_bf", "resolve_rscale"]

_REL_TOL = 1e-8


class QuadratureError(ArithmeticError):
    """The Bayes factor integral did not reach the requested accuracy."""


@dataclass(frozen=True)
class BfResult:
    bf10: float
    log_bf10: float
    rscale: float
    threshold: float = 3.0

    def __post_init__(self):
        if not self.threshold > 1.0:
            raise ValueError(f"evidence threshold must exceed 1, got {self.threshold}")


def resolve_rscale(rscale: float | str) -> float:
    if isinstance(rscale, str):
        try:
            return RSCALE_PRESETS[rscale]
        except KeyError:
            try:
                rscale = float(rscale)
            except ValueError:
                raise InputError(f"unknown rscale {rscale!r}; use a number or one of {sorted(RSCALE_PRESETS)}") from None
    if not (rscale > 0 and math.isfinite(rscale)):
        raise InputError(f"rscale must be positive, got {rscale}")
    return float(rscale)


def _mode_log_g(r2, n_obs, k, b) -> tuple[float, float]:
    """Mode and curvature scale of the integrand as a density in u = log g."""
    a_half = 0.5 * (n_obs - k - 1)
    c_half = 0.5 * (n_obs - 1)
    shrink = 1.0 - r2

    def slope(u):
        return (a_half * special.expit(u)
                - c_half * special.expit(u + math.log(shrink))
                - 0.5 + b * math.exp(-u))

    lo, hi = -40.0, 40.0
    while slope(lo) <= 0:
        lo -= 40.0
    while slope(hi) >= 0:
        hi += 40.0
        if hi > 2000:
            raise QuadratureError("could not locate the integrand mode")
    u0 = optimize.brentq(slope, lo, hi, xtol=1e-12)
    h = 1e-4
    curv = (slope(u0 + h) - slope(u0 - h)) / (2 * h)
    width = 1.0 / math.sqrt(-curv) if curv < 0 else 1.0
    return u0, width


def jzs_log_bf(r2: float, n_obs: int, k: int, rscale: float | str = "medium") -> float:
    """Natural log of the JZS BF10 for regression; see module docstring."""
    if not (0.0 <= r2 < 1.0):
        raise InputError(f"R^2 must lie in [0, 1), got {r2}")
    if n_obs <= k + 1 or k < 1:
        raise InputError(f"need N > K + 1 and K >= 1, got N={n_obs}, K={k}")
    r = resolve_rscale(rscale)
    b = n_obs * r * r / 2.0

    u0, width = _mode_log_g(r2, n_obs, k, b)
    # integrate over u = log g (Jacobian g), scaled by the peak value
    c1, c2 = 0.5 * (n_obs - k - 1), 0.5 * (n_obs - 1)
    shift = math.log1p(-r2)
    const = 0.5 * math.log(b / math.pi)

    def log_h(u):
        # logaddexp(0, x) written out for scalars
        lp1 = u + math.log1p(math.exp(-u)) if u > 0 else math.log1p(math.exp(u))
        v = u + shift
        lp2 = v + math.log1p(math.exp(-v)) if v > 0 else math.log1p(math.exp(v))
        inv = b * math.exp(-u) if u > -700 else math.inf
        return c1 * lp1 - c2 * lp2 + const - 0.5 * u - inv

    scale = log_h(u0)

    def f(u):
        return math.exp(log_h(u) - scale)

    lo, hi = u0 - 8 * width, u0 + 8 * width
    points = [u0 + m * width for m in (-4, -2, -1, 0, 1, 2, 4)]
    val = err = 0.0
    for a, c, pts in ((-math.inf, lo, None), (lo, hi, points), (hi, math.inf, None)):
        v, e = integrate.quad(f, a, c, points=pts, limit=200, epsabs=0.0, epsrel=_REL_TOL)
        val += v
        err += e
    if not (val > 0 and math.isfinite(val)) or err > 1e-6 * val:
        raise QuadratureError(f"BF integral failed to converge (value {val}, error {err})")
    return math.log(val) + scale


def jzs_bf_regression(s: RegressionSummary, rscale: float | str = "medium", threshold: float = 3.0) -> BfResult:
    """JZS Bayes factor for the full model over the intercept-only model.

    Examples
    --------
    >>> from noninf.model_fit import regression_from_r2
    >>> round(jzs_bf_regression(regression_from_r2(0.000216, 4580, 2)).bf10, 5)
    0.00284
    """
    if s.r_squared >= 1.0:
        raise InputError("Bayes factor is undefined at R^2 = 1")
    log_bf = jzs_log_bf(s.r_squared, s.n_obs, s.n_predictors, rscale)
    return BfResult(math.exp(log_bf), log_bf, resolve_rscale(rscale), threshold)


def bf_decide(b: BfResult) -> DecisionOutcome:
    """Positive if BF10 >= threshold, negative if BF10 <= 1/threshold (both inclusive)."""
    if b.log_bf10 >= math.log(b.threshold):
        return DecisionOutcome(Outcome.POSITIVE)
    if b.log_bf10 <= -math.log(b.threshold):
        return DecisionOutcome(Outcome.NEGATIVE)
    return DecisionOutcome(Outcome.INCONCLUSIVE)
