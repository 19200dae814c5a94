"""Curve points for the conclusion-region plot and the simulation figures.

Everything is returned as lists of flat dicts so it can go straight to CSV;
plotting is left to the caller.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from .bayes import jzs_log_bf, resolve_rscale
from .distributions import ncf_quantile
from .inference import noninf_ncp

__all__ = [
    "RegionBoundary",
    "figure1_n_grid",
    "region_boundary",
    "region_rows",
    "simulation_curve_rows",
    "write_rows",
]


def figure1_n_grid(lo: int = 30, hi: int = 1000, count: int = 76) -> list[int]:
    """Log-spaced integer sample sizes (distinct, endpoints included)."""
    grid = np.unique(np.round(np.geomspace(lo, hi, count)).astype(int))
    if grid.size != count:
        raise ValueError(f"grid of {count} points from {lo} to {hi} has duplicates")
    return grid.tolist()


def _r2_from_f(f: float, df1: int, df2: int) -> float:
    return df1 * f / (df1 * f + df2)


@dataclass(frozen=True)
class RegionBoundary:
    """R^2 cut points for one (K, N).

    CET: positive above ``r2_nhst``; the non-inferiority test rejects below
    ``r2_noninf``.  BF: positive above ``r2_bf_pos``, negative below
    ``r2_bf_neg`` (``None`` when even R^2 = 0 does not reach 1/threshold).
    """

    k: int
    n_obs: int
    delta: float
    threshold: float
    r2_nhst: float
    r2_noninf: float
    r2_bf_pos: float
    r2_bf_neg: float | None

    @property
    def inconclusive_possible(self) -> bool:
        return self.r2_noninf <= self.r2_nhst

    @property
    def negative_above_delta(self) -> bool:
        """A CET negative conclusion is reachable with R^2 > delta."""
        return min(self.r2_noninf, self.r2_nhst) > self.delta

    def as_dict(self) -> dict:
        return {
            "k": self.k, "n_obs": self.n_obs, "delta": self.delta, "threshold": self.threshold,
            "r2_nhst": self.r2_nhst, "r2_noninf": self.r2_noninf,
            "r2_bf_pos": self.r2_bf_pos, "r2_bf_neg": self.r2_bf_neg,
            "inconclusive_possible": self.inconclusive_possible,
        }


def _bf_cut(target: float, n: int, k: int, rscale: float) -> float | None:
    # log BF is increasing in R^2; returns None when the target lies below log BF(0)
    g = lambda r2: jzs_log_bf(r2, n, k, rscale) - target  # noqa: E731
    lo, hi = 0.0, 1.0 - 1e-12
    if g(lo) > 0:
        return None
    return optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-12)


def region_boundary(k: int, n_obs: int, delta: float = 0.10, alpha: float = 0.05,
                    threshold: float = 3.0, rscale="medium") -> RegionBoundary:
    df1, df2 = k, n_obs - k - 1
    r = resolve_rscale(rscale)
    f_nhst = ncf_quantile(1.0 - alpha, df1, df2, 0.0)
    f_noninf = ncf_quantile(alpha, df1, df2, noninf_ncp(n_obs, delta))
    log_t = math.log(threshold)
    return RegionBoundary(
        k, n_obs, delta, threshold,
        r2_nhst=_r2_from_f(f_nhst, df1, df2),
        r2_noninf=_r2_from_f(f_noninf, df1, df2),
        r2_bf_pos=_bf_cut(log_t, n_obs, k, r),
        r2_bf_neg=_bf_cut(-log_t, n_obs, k, r),
    )


def region_rows(ks: Sequence[int] = (1, 5, 12), n_grid: Iterable[int] | None = None,
                delta: float = 0.10, alpha: float = 0.05, threshold: float = 3.0,
                rscale="medium") -> list[dict]:
    n_grid = figure1_n_grid() if n_grid is None else list(n_grid)
    return [
        region_boundary(k, n, delta, alpha, threshold, rscale).as_dict()
        for k in ks for n in n_grid if n > k + 1
    ]


SIM_CURVE_FIELDS = {
    "power": ["k", "sigma_sq", "true_p2", "n_obs", "delta", "reject_rate", "reject_se", "power_formula"],
    "agreement": [
        "k", "sigma_sq", "true_p2", "n_obs", "delta", "threshold",
        "cet_positive", "cet_negative", "cet_inconclusive",
        "bf_positive", "bf_negative", "bf_inconclusive", "agreement", "contradiction",
    ],
}


def simulation_curve_rows(results_csv: str | os.PathLike, kind: str) -> list[dict]:
    """Select the plotted columns from a results CSV, sorted for line plots."""
    fields = SIM_CURVE_FIELDS[kind]
    with open(results_csv, newline="", encoding="utf-8") as fh:
        rows = [{f: r[f] for f in fields} for r in csv.DictReader(fh)]
    key = lambda r: tuple(float(r[f]) if r[f] else -1.0 for f in fields[:6])  # noqa: E731
    return sorted(rows, key=key)


def write_rows(rows: Sequence[dict], path: str | os.PathLike) -> None:
    if not rows:
        raise ValueError("nothing to write")
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.items()})
