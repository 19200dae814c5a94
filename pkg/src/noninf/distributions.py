"""Non-central F distribution: CDF, survival function, quantile and
inversion over the non-centrality parameter.

The CDF is evaluated as a Poisson(ncp/2) mixture of regularized incomplete
beta functions,

    P(F <= x) = sum_j Pois(j; ncp/2) * I_y(df1/2 + j, df2/2),
    y = df1 x / (df1 x + df2),

summed over a window of Poisson indices around the mode that leaves less than
``_TAIL_MASS`` of probability outside on either side.  Only one incomplete beta
evaluation is made per ``x``; the rest of the window is filled with the
recurrence ``I_y(a, b) = I_y(a + 1, b) + T(a)``, accumulated in the direction in
which every step adds a positive term.

All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

__all__ = [
    "ConvergenceError",
    "DomainError",
    "NcfParams",
    "UNDERFLOW_THRESHOLD",
    "central_f_cdf",
    "central_f_sf",
    "flush_underflow",
    "invert_ncp",
    "ncf_cdf",
    "ncf_quantile",
    "ncf_sf",
]

_TAIL_MASS = 1e-17
_REL_TAIL = 1e-16
_FLOOR = 1e-305
_MAX_TERMS_PER_CHUNK = 2_000_000
_MAX_NCP = 1e7
UNDERFLOW_THRESHOLD = 1e-300


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(ArithmeticError):
    """A root search failed to bracket or converge."""


@dataclass(frozen=True)
class NcfParams:
    df1: float
    df2: float
    ncp: float = 0.0

    def __post_init__(self):
        for name in ("df1", "df2", "ncp"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.df1 <= 0 or self.df2 <= 0:
            raise DomainError(f"degrees of freedom must be positive, got ({self.df1}, {self.df2})")
        if self.ncp < 0:
            raise DomainError(f"ncp must be non-negative, got {self.ncp}")


def flush_underflow(p: float) -> tuple[float, bool]:
    """Return ``(p, False)`` or ``(0.0, True)`` when ``p`` is below 1e-300."""
    if p < UNDERFLOW_THRESHOLD:
        return 0.0, True
    return p, False


def _as_x(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise DomainError("x contains NaN")
    if (arr < 0).any():
        raise DomainError("x must be non-negative")
    return np.atleast_1d(arr), arr.ndim == 0


def _out(values: np.ndarray, scalar: bool):
    values = np.clip(values, 0.0, 1.0)
    return float(values[0]) if scalar else values


def _poisson_window(lam: float) -> tuple[int, int]:
    """Index range [lo, hi] holding all but ``_TAIL_MASS`` per side of Pois(lam)."""
    mode = int(math.floor(lam))
    step = max(8, int(math.ceil(math.sqrt(lam))))
    hi = mode + step
    while special.pdtrc(hi, lam) > _TAIL_MASS:
        hi += step
    lo = max(0, mode - step)
    while lo > 0 and special.pdtr(lo - 1, lam) > _TAIL_MASS:
        lo = max(0, lo - step)
    return lo, hi


def _poisson_weights(lam: float, lo: int, hi: int) -> np.ndarray:
    """Pois(j; lam) for j in [lo, hi].

    Built by the ratio lam / (j + 1) outward from the mode and scaled to the
    exact window mass; the direct ``exp(j log lam - lgamma(j + 1) - lam)`` is
    off by ~1e-12 relative once ``lam`` is in the thousands.
    """
    j = np.arange(lo, hi + 1, dtype=float)
    k0 = min(max(int(math.floor(lam)), lo), hi) - lo
    log_r = math.log(lam) - np.log(j[:-1] + 1.0)
    log_w = np.zeros(j.size)
    log_w[k0 + 1:] = np.cumsum(log_r[k0:])
    log_w[:k0] = -np.cumsum(log_r[:k0][::-1])[::-1]
    w = np.exp(log_w)
    inside = 1.0 - special.pdtrc(hi, lam) - (special.pdtr(lo - 1, lam) if lo > 0 else 0.0)
    return w * (inside / math.fsum(w))


def central_f_cdf(x, df1: float, df2: float):
    """Central F CDF through the incomplete beta identity."""
    NcfParams(df1, df2)
    xs, scalar = _as_x(x)
    with np.errstate(invalid="ignore"):
        y = df1 * xs / (df1 * xs + df2)
    y = np.where(np.isinf(xs), 1.0, y)
    return _out(special.betainc(df1 / 2.0, df2 / 2.0, y), scalar)


def central_f_sf(x, df1: float, df2: float):
    """Central F upper tail, computed directly to keep tiny tails accurate."""
    NcfParams(df1, df2)
    xs, scalar = _as_x(x)
    with np.errstate(invalid="ignore"):
        y = df1 * xs / (df1 * xs + df2)
    y = np.where(np.isinf(xs), 1.0, y)
    return _out(special.betaincc(df1 / 2.0, df2 / 2.0, y), scalar)


def _beta_steps(y, cy, a, b, j, log_t_const) -> np.ndarray:
    """T(a + j) = y^(a+j) (1-y)^b / ((a+j) B(a+j, b)) for each row of ``y``.

    The closed-form logarithm loses ~1e-12 relative accuracy for large ``b``
    (``b log(1-y)`` and ``log B`` nearly cancel), so it only locates the
    largest term per row.  That term is recomputed from the Beta density and
    the others follow from the ratio T(a+j+1)/T(a+j) = y (a+b+j) / (a+j+1),
    accumulated outward from the anchor.
    """
    with np.errstate(divide="ignore"):
        log_y = np.log(y)[:, None]
        rough = (a + j)[None, :] * log_y + b * np.log(cy)[:, None] + log_t_const[None, :]
    k0 = np.argmax(rough, axis=1)
    a0 = a + j[k0]
    anchor = rough[np.arange(y.size), k0]
    # the Beta density overflows (and raises) for subnormal y or 1 - y
    ok = (y > 1e-280) & (cy > 1e-280)
    with np.errstate(divide="ignore"):
        exact = np.log(y[ok] * cy[ok] * stats.beta.pdf(y[ok], a0[ok], b) / a0[ok])
    good = np.isfinite(exact)
    anchor[np.flatnonzero(ok)[good]] = exact[good]

    # log ratio between consecutive terms, column k links j[k] -> j[k+1]
    log_r = log_y + np.log1p((b - 1.0) / (a + j[:-1] + 1.0))[None, :]
    cols = np.arange(j.size - 1)[None, :]
    up = np.where(cols >= k0[:, None], log_r, 0.0)
    down = np.where(cols < k0[:, None], log_r, 0.0)
    offset = np.zeros((y.size, j.size))
    offset[:, 1:] += np.cumsum(up, axis=1)
    offset[:, :-1] -= np.cumsum(down[:, ::-1], axis=1)[:, ::-1]
    return np.exp(anchor[:, None] + offset)


def _window_sum(x, params: NcfParams, lo: int, hi: int, upper: bool) -> np.ndarray:
    """Mixture over Poisson indices [lo, hi] for interior ``x`` values."""
    a = params.df1 / 2.0
    b = params.df2 / 2.0
    lam = params.ncp / 2.0
    j = np.arange(lo, hi + 1, dtype=float)
    w = _poisson_weights(lam, lo, hi)
    # log of T(a + j) = y^(a+j) (1-y)^b / ((a+j) B(a+j, b)) without the y-terms
    log_t_const = -np.log(a + j) - special.betaln(a + j, b)

    out = np.empty_like(x)
    rows = max(1, _MAX_TERMS_PER_CHUNK // j.size)
    for start in range(0, x.size, rows):
        xc = x[start:start + rows]
        denom = params.df1 * xc + params.df2
        y = params.df1 * xc / denom
        cy = params.df2 / denom
        t = _beta_steps(y, cy, a, b, j, log_t_const)
        if not upper:
            # I_j = I_hi + sum_{i=j}^{hi-1} T_i
            i_top = special.betainc(a + hi, b, y)
            tail = np.cumsum(t[:, ::-1], axis=1)[:, ::-1]
            terms = i_top[:, None] + tail - t[:, -1:]
            total = terms @ w
            if lo > 0:
                total += special.pdtr(lo - 1, lam) * terms[:, 0]
        else:
            # J_j = 1 - I_j = J_lo + sum_{i=lo}^{j-1} T_i
            j_bottom = special.betaincc(a + lo, b, y)
            head = np.cumsum(t, axis=1) - t
            terms = j_bottom[:, None] + head
            total = terms @ w
            total += special.pdtrc(hi, lam) * terms[:, -1]
        out[start:start + rows] = total
    return out


def _mixture(xs: np.ndarray, params: NcfParams, upper: bool) -> np.ndarray:
    """CDF (or SF) by the Poisson mixture.

    Every beta term lies in [0, 1], so the Poisson mass left out below the
    window bounds the CDF error and the mass above it bounds the SF error.
    The default window is fine in absolute terms; for values deep in the
    tail that side of the window is widened until the left-out mass is below
    ``_REL_TAIL`` times the result.
    """
    lam = params.ncp / 2.0
    lo, hi = _poisson_window(lam)

    out = np.empty_like(xs)
    out[xs == 0] = 0.0 if not upper else 1.0
    out[np.isinf(xs)] = 1.0 if not upper else 0.0
    idx = np.flatnonzero((xs > 0) & np.isfinite(xs))
    if idx.size == 0:
        return out
    vals = _window_sum(xs[idx], params, lo, hi, upper)

    left_out = special.pdtrc(hi, lam) if upper else (special.pdtr(lo - 1, lam) if lo > 0 else 0.0)
    need = left_out > _REL_TAIL * np.maximum(vals, _FLOOR)
    if need.any():
        target = _REL_TAIL * max(float(vals[need].min()), _FLOOR)
        step = max(8, int(math.ceil(math.sqrt(lam))))
        if upper:
            while special.pdtrc(hi, lam) > target:
                hi += step
        else:
            while lo > 0 and special.pdtr(lo - 1, lam) > target:
                lo = max(0, lo - step)
        vals[need] = _window_sum(xs[idx][need], params, lo, hi, upper)
    out[idx] = vals
    return out


def ncf_cdf(x, df1: float, df2: float, ncp: float = 0.0):
    """Cumulative distribution function of the non-central F distribution.

    Parameters
    ----------
    x : float or array_like
        Evaluation point(s), ``x >= 0``.
    df1, df2 : float
        Numerator and denominator degrees of freedom.
    ncp : float
        Non-centrality parameter; ``0`` gives the central F distribution.

    Returns
    -------
    float or ndarray
        ``P(F <= x)``; a float for scalar ``x``.
    """
    params = NcfParams(float(df1), float(df2), float(ncp))
    if params.ncp / 2.0 == 0.0:
        return central_f_cdf(x, params.df1, params.df2)
    xs, scalar = _as_x(x)
    return _out(_mixture(xs, params, upper=False), scalar)


def ncf_sf(x, df1: float, df2: float, ncp: float = 0.0):
    """Complementary CDF ``P(F > x)``, accurate in the far upper tail."""
    params = NcfParams(float(df1), float(df2), float(ncp))
    if params.ncp / 2.0 == 0.0:
        return central_f_sf(x, params.df1, params.df2)
    xs, scalar = _as_x(x)
    return _out(_mixture(xs, params, upper=True), scalar)


def _brent(f, lo: float, hi: float, what: str) -> float:
    try:
        root, info = optimize.brentq(
            f, lo, hi, xtol=np.finfo(float).tiny, rtol=4 * np.finfo(float).eps,
            maxiter=500, full_output=True,
        )
    except (ValueError, RuntimeError) as exc:
        raise ConvergenceError(f"{what}: {exc}") from exc
    if not info.converged:
        raise ConvergenceError(f"{what}: root search did not converge ({info.flag})")
    return float(root)


def ncf_quantile(p: float, df1: float, df2: float, ncp: float = 0.0) -> float:
    """Return ``x`` with ``ncf_cdf(x, df1, df2, ncp) == p``.

    The root is bracketed by geometric expansion from a point near the mean and
    then found with Brent's method (bisection safeguarded secant /
    inverse-quadratic steps).
    """
    params = NcfParams(float(df1), float(df2), float(ncp))
    if not (0.0 < p < 1.0) or math.isnan(p):
        raise DomainError(f"p must lie in (0, 1), got {p!r}")

    def f(x):
        return ncf_cdf(x, params.df1, params.df2, params.ncp) - p

    hi = max(1.0, (params.df1 + params.ncp) / params.df1)
    for _ in range(1100):
        if f(hi) >= 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"could not bracket the {p} quantile of {params}")
    lo = hi / 2.0
    while lo > 1e-300 and f(lo) > 0:
        lo /= 2.0
    if f(lo) > 0:
        return 0.0
    return _brent(f, lo, hi, "ncf_quantile")


def invert_ncp(x: float, df1: float, df2: float, target_p: float) -> float:
    """Solve ``ncf_cdf(x; df1, df2, ncp) = target_p`` for ``ncp``.

    The CDF at fixed ``x > 0`` decreases strictly in ``ncp``.  When even the
    central distribution gives ``cdf <= target_p`` the solution is defined to
    be 0, matching a one-sided interval ``[0, upper]`` for the non-centrality.

    Raises
    ------
    ConvergenceError
        If no root is bracketed below ``ncp = 1e7``.
    """
    NcfParams(float(df1), float(df2))
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"x must be positive and finite, got {x!r}")
    if not (0.0 < target_p < 1.0):
        raise DomainError(f"target_p must lie in (0, 1), got {target_p!r}")

    def f(ncp):
        return ncf_cdf(x, df1, df2, ncp) - target_p

    if f(0.0) <= 0:
        return 0.0
    hi = max(1.0, df1 * x)
    while f(hi) > 0:
        hi *= 2.0
        if hi > _MAX_NCP:
            raise ConvergenceError(
                f"ncp root not bracketed below {_MAX_NCP:g} (x={x}, df=({df1}, {df2}), p={target_p})"
            )
    return _brent(f, 0.0, hi, "invert_ncp")
