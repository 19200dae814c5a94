"""Monte Carlo engine for the operating characteristics of the tests.

A scenario fixes a full-factorial 0/1 design with K binary
covariates, coefficients, residual variance and sample size.  Each replicate
draws ``y ~ Normal(X beta, sigma^2)``, and records the NHST and
non-inferiority p-values for every margin, the CET decision and, when
evidence thresholds are configured, the JZS Bayes factor decision.

Replicate ``i`` of a scenario always draws from its own Philox stream
(key = scenario seed, counter offset by ``i``), and replicates are processed
in fixed-size chunks whose integer counts are folded in chunk order, so
results do not depend on the number of workers.
"""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .bayes import QuadratureError, jzs_log_bf, resolve_rscale
from .distributions import ConvergenceError, ncf_cdf, ncf_sf
from .inference import noninf_ncp, power_noninf
from .model_fit import InputError

__all__ = [
    "BalancedBinaryDesign",
    "ConfigError",
    "Scenario",
    "ScenarioResult",
    "StudyConfig",
    "agreement_summary",
    "load_study",
    "read_results_csv",
    "run_scenario",
    "run_study",
    "simulate_dataset",
    "true_p_squared",
    "write_manifest",
    "write_results_csv",
]

PRESET_DIR = Path(__file__).parent / "presets"
DEFAULT_CHUNK = 500
_LABELS = ("positive", "negative", "inconclusive")


class ConfigError(ValueError):
    """Malformed or inconsistent simulation config."""


@dataclass(frozen=True)
class BalancedBinaryDesign:
    """Full-factorial layout of K 0/1 covariates.

    Rows run through the 2^K cells in round-robin order, so the design is
    exactly balanced and orthogonal when N is a multiple of 2^K and as close
    to it as possible otherwise.
    """

    k: int

    def __post_init__(self):
        if not 1 <= self.k <= 16:
            raise ConfigError(f"unsupported number of binary covariates: {self.k}")

    @property
    def cells(self) -> int:
        return 2 ** self.k

    def is_balanced(self, n: int) -> bool:
        return n % self.cells == 0

    def balanced_n(self, n: int) -> int:
        """Largest multiple of the cell count not exceeding ``n``."""
        return n - n % self.cells

    def matrix(self, n: int) -> np.ndarray:
        cells = np.array(list(itertools.product((0.0, 1.0), repeat=self.k)))
        return cells[np.arange(n) % self.cells]


def true_p_squared(beta: Sequence[float], design: BalancedBinaryDesign, sigma_sq: float,
                   n_obs: int | None = None) -> float:
    """Proportion of variance explained by the covariates.

    For a balanced design (or ``n_obs=None``) the 0/1 columns have variance
    1/4 and are uncorrelated, so Var(X beta) = sum(beta[1:]^2) / 4.  For a
    round-robin design whose N is not a multiple of 2^K, the covariance form
    b' S_X b / (b' S_X b + sigma^2) is evaluated on the realized rows (S_X with
    divisor N), which is the value that makes the boundary ncp exact.
    """
    if not isinstance(design, BalancedBinaryDesign):
        raise ConfigError(f"unsupported design {design!r}")
    if len(beta) != design.k + 1:
        raise ConfigError(f"beta needs {design.k + 1} entries (intercept first), got {len(beta)}")
    if not sigma_sq > 0:
        raise ConfigError("sigma_sq must be positive")
    slopes = np.asarray(beta[1:], dtype=float)
    if n_obs is None or design.is_balanced(n_obs):
        explained = math.fsum(slopes * slopes) / 4.0
    else:
        cov = np.cov(design.matrix(n_obs), rowvar=False, bias=True).reshape(design.k, design.k)
        explained = float(slopes @ cov @ slopes)
    return explained / (explained + sigma_sq)


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    n_obs: int
    design: BalancedBinaryDesign
    beta: tuple[float, ...]
    sigma_sq: float
    delta_grid: tuple[float, ...]
    alpha: float = 0.05
    bf_thresholds: tuple[float, ...] = ()
    replicates: int = 5000
    seed: int = 0
    n_requested: int | None = None
    rscale: float = resolve_rscale("medium")

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if len(self.beta) != self.design.k + 1:
            raise ConfigError(f"beta needs {self.design.k + 1} entries, got {len(self.beta)}")
        if self.n_obs <= self.design.k + 1:
            raise ConfigError(f"N={self.n_obs} too small for K={self.design.k}")
        if not all(0 < d < 1 for d in self.delta_grid):
            raise ConfigError("every delta must lie in (0, 1)")
        if not all(t > 1 for t in self.bf_thresholds):
            raise ConfigError("evidence thresholds must exceed 1")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def k(self) -> int:
        return self.design.k

    @property
    def true_p_squared(self) -> float:
        return true_p_squared(self.beta, self.design, self.sigma_sq, self.n_obs)


def _stream(seed: int, replicate_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, replicate_index]))


def simulate_dataset(scenario: Scenario, replicate_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(y, X)`` for one replicate; ``X`` excludes the intercept."""
    X = scenario.design.matrix(scenario.n_obs)
    mean = scenario.beta[0] + X @ np.asarray(scenario.beta[1:])
    z = _stream(scenario.seed, replicate_index).standard_normal(scenario.n_obs)
    return mean + math.sqrt(scenario.sigma_sq) * z, X


@dataclass
class _Counts:
    """Integer tallies for a block of replicates (see ScenarioResult)."""

    n_delta: int
    n_thr: int
    ok: int = 0
    failures: int = 0
    nhst_reject: int = 0
    sum_r2: float = 0.0
    reject: np.ndarray = None
    cet: np.ndarray = None
    cet_snm: np.ndarray = None
    bf: np.ndarray = None
    agree: np.ndarray = None
    contra: np.ndarray = None

    def __post_init__(self):
        d, t = self.n_delta, self.n_thr
        z = lambda *shape: np.zeros(shape, dtype=np.int64)  # noqa: E731
        self.reject = z(d) if self.reject is None else self.reject
        self.cet = z(d, 3) if self.cet is None else self.cet
        self.cet_snm = z(d) if self.cet_snm is None else self.cet_snm
        self.bf = z(t, 3) if self.bf is None else self.bf
        self.agree = z(d, t) if self.agree is None else self.agree
        self.contra = z(d, t) if self.contra is None else self.contra

    def add(self, other: "_Counts") -> None:
        self.ok += other.ok
        self.failures += other.failures
        self.nhst_reject += other.nhst_reject
        self.sum_r2 += other.sum_r2
        for name in ("reject", "cet", "cet_snm", "bf", "agree", "contra"):
            getattr(self, name).__iadd__(getattr(other, name))


def _labels(positive: np.ndarray, negative: np.ndarray) -> np.ndarray:
    """0 = positive, 1 = negative, 2 = inconclusive."""
    return np.where(positive, 0, np.where(negative, 1, 2))


def _run_chunk(scenario: Scenario, start: int, stop: int) -> _Counts:
    n, k = scenario.n_obs, scenario.k
    X = scenario.design.matrix(n)
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), X]))
    mean = scenario.beta[0] + X @ np.asarray(scenario.beta[1:])
    sd = math.sqrt(scenario.sigma_sq)

    reps = stop - start
    Y = np.empty((n, reps))
    for col, rep in enumerate(range(start, stop)):
        Y[:, col] = mean + sd * _stream(scenario.seed, rep).standard_normal(n)

    centred = Y - Y.mean(axis=0)
    ss_tot = np.einsum("ij,ij->j", centred, centred)
    resid = Y - q @ (q.T @ Y)
    ss_res = np.einsum("ij,ij->j", resid, resid)
    r2 = np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0)
    df2 = n - k - 1
    ok = (r2 < 1.0) & np.isfinite(r2)

    counts = _Counts(len(scenario.delta_grid), len(scenario.bf_thresholds))
    log_bf = np.zeros(reps)
    if scenario.bf_thresholds:
        for i in np.flatnonzero(ok):
            try:
                log_bf[i] = jzs_log_bf(float(r2[i]), n, k, scenario.rscale)
            except (QuadratureError, InputError):
                ok[i] = False

    r2 = r2[ok]
    log_bf = log_bf[ok]
    f_stat = (r2 / k) / ((1.0 - r2) / df2)
    counts.ok = int(ok.sum())
    counts.failures = reps - counts.ok
    counts.sum_r2 = math.fsum(r2)
    if counts.ok == 0:
        return counts

    alpha = scenario.alpha
    nhst_sig = ncf_sf(f_stat, k, df2, 0.0) < alpha
    counts.nhst_reject = int(nhst_sig.sum())

    bf_labels = [
        _labels(log_bf >= math.log(t), log_bf <= -math.log(t)) for t in scenario.bf_thresholds
    ]
    for ti, lab in enumerate(bf_labels):
        counts.bf[ti] = np.bincount(lab, minlength=3)

    for di, delta in enumerate(scenario.delta_grid):
        noninf_sig = ncf_cdf(f_stat, k, df2, noninf_ncp(n, delta)) < alpha
        counts.reject[di] = int(noninf_sig.sum())
        cet = _labels(nhst_sig, ~nhst_sig & noninf_sig)
        counts.cet[di] = np.bincount(cet, minlength=3)
        counts.cet_snm[di] = int((nhst_sig & noninf_sig).sum())
        for ti, lab in enumerate(bf_labels):
            counts.agree[di, ti] = int((cet == lab).sum())
            counts.contra[di, ti] = int((((cet == 0) & (lab == 1)) | ((cet == 1) & (lab == 0))).sum())
    return counts


@dataclass
class ScenarioResult:
    """Tallies for one scenario and the rates derived from them.

    Rates are over successful replicates; ``failures`` counts replicates
    where a numerical step failed.
    """

    scenario: Scenario
    counts: _Counts
    power_formula: dict[float, float] = field(default_factory=dict)

    @property
    def true_p_squared(self) -> float:
        return self.scenario.true_p_squared

    @property
    def successes(self) -> int:
        return self.counts.ok

    @property
    def failures(self) -> int:
        return self.counts.failures

    def _rate(self, count) -> float:
        return float(count) / self.counts.ok if self.counts.ok else math.nan

    @property
    def mc_se(self) -> float:
        """Standard error of a rate near alpha at this number of replicates."""
        a = self.scenario.alpha
        return math.sqrt(a * (1 - a) / self.counts.ok) if self.counts.ok else math.nan

    @staticmethod
    def se(rate: float, n: int) -> float:
        return math.sqrt(rate * (1.0 - rate) / n) if n else math.nan

    @property
    def nhst_rate(self) -> float:
        return self._rate(self.counts.nhst_reject)

    @property
    def mean_r2(self) -> float:
        return self.counts.sum_r2 / self.counts.ok if self.counts.ok else math.nan

    @property
    def rejection_rate_per_delta(self) -> dict[float, float]:
        return {d: self._rate(c) for d, c in zip(self.scenario.delta_grid, self.counts.reject)}

    @property
    def cet_rates(self) -> dict[float, tuple[float, float, float]]:
        return {d: tuple(self._rate(c) for c in row) for d, row in zip(self.scenario.delta_grid, self.counts.cet)}

    @property
    def bf_rates(self) -> dict[float, tuple[float, float, float]]:
        return {t: tuple(self._rate(c) for c in row) for t, row in zip(self.scenario.bf_thresholds, self.counts.bf)}

    @property
    def agreement(self) -> dict[tuple[float, float], float]:
        return {
            (d, t): self._rate(self.counts.agree[di, ti])
            for di, d in enumerate(self.scenario.delta_grid)
            for ti, t in enumerate(self.scenario.bf_thresholds)
        }

    @property
    def contradiction(self) -> dict[tuple[float, float], float]:
        return {
            (d, t): self._rate(self.counts.contra[di, ti])
            for di, d in enumerate(self.scenario.delta_grid)
            for ti, t in enumerate(self.scenario.bf_thresholds)
        }


def _chunks(scenario: Scenario, chunk_size: int) -> list[tuple[int, int]]:
    return [(s, min(s + chunk_size, scenario.replicates)) for s in range(0, scenario.replicates, chunk_size)]


def _power_curve(scenario: Scenario) -> dict[float, float]:
    out = {}
    for d in scenario.delta_grid:
        try:
            out[d] = power_noninf(scenario.n_obs, scenario.k, d, scenario.alpha)
        except ConvergenceError:
            out[d] = math.nan
    return out


def _chunk_task(args):
    scenario, start, stop = args
    return _run_chunk(scenario, start, stop)


def run_study(scenarios: Sequence[Scenario], workers: int = 1,
              chunk_size: int = DEFAULT_CHUNK) -> list[ScenarioResult]:
    """Run every scenario; ``workers > 1`` fans chunks out to processes."""
    tasks = [(s, a, b) for s in scenarios for a, b in _chunks(s, chunk_size)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_task, tasks, chunksize=1))
    else:
        parts = [_chunk_task(t) for t in tasks]

    results, pos = [], 0
    for s in scenarios:
        total = _Counts(len(s.delta_grid), len(s.bf_thresholds))
        for _ in _chunks(s, chunk_size):
            total.add(parts[pos])
            pos += 1
        results.append(ScenarioResult(s, total, _power_curve(s)))
    return results


def run_scenario(scenario: Scenario, workers: int = 1, chunk_size: int = DEFAULT_CHUNK) -> ScenarioResult:
    return run_study([scenario], workers, chunk_size)[0]


def agreement_summary(results: Iterable[ScenarioResult], delta: float, threshold: float) -> tuple[float, float]:
    """Replicate-weighted average agreement and contradiction rates across scenarios.

    Agreement: CET and Bayes factor reach the same label.  Contradiction: one
    is positive and the other negative.
    """
    agree = contra = total = 0
    for r in results:
        s = r.scenario
        try:
            di = _index(s.delta_grid, delta)
            ti = _index(s.bf_thresholds, threshold)
        except KeyError:
            continue
        agree += int(r.counts.agree[di, ti])
        contra += int(r.counts.contra[di, ti])
        total += r.counts.ok
    if total == 0:
        raise ValueError(f"no results contain delta={delta}, threshold={threshold}")
    return agree / total, contra / total


def _index(values: Sequence[float], target: float) -> int:
    for i, v in enumerate(values):
        if math.isclose(v, target, rel_tol=1e-9, abs_tol=1e-12):
            return i
    raise KeyError(target)


# --- config files ------------------------------------------------------------


@dataclass(frozen=True)
class StudyConfig:
    name: str
    scenarios: tuple[Scenario, ...]
    seed: int
    replicates: int
    adjustments: tuple[str, ...] = ()
    source: str = ""


def _floats(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"expected numbers, got {text!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    values = _floats(text)
    if any(v != int(v) for v in values):
        raise ConfigError(f"expected integers, got {text!r}")
    return tuple(int(v) for v in values)


def _resolve_config(path: str | os.PathLike) -> Path:
    p = Path(path)
    if p.exists():
        return p
    preset = PRESET_DIR / p.name
    if preset.exists():
        return preset
    raise ConfigError(f"config not found: {path}")


def scenario_seed(study_seed: int, index: int) -> int:
    state = np.random.SeedSequence([study_seed, index]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def load_study(path: str | os.PathLike, replicates: int | None = None, full: bool = False) -> StudyConfig:
    """Parse a study config into scenarios.

    The ``[study]`` section holds shared settings; every ``[design ...]``
    section contributes the cross product of its ``sigma_sq`` and ``n_obs``
    lists.  A sample size that is not a multiple of the 2^K design cells is
    either kept and filled round-robin (``balance = cyclic``, the default) or
    truncated to the largest balanced size (``balance = truncate``); either
    adjustment is recorded.
    """
    p = _resolve_config(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        text = p.read_text(encoding="utf-8")
        parser.read_string(text, source=str(p))
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if "study" not in parser:
        raise ConfigError("config needs a [study] section")
    st = parser["study"]
    try:
        name = st.get("name", p.stem)
        alpha = st.getfloat("alpha", 0.05)
        seed = st.getint("seed")
        reps = replicates or (st.getint("full_replicates") if full else None) or st.getint("replicates", 5000)
        deltas = _floats(st.get("delta_grid", ""))
        boundary = st.getboolean("boundary_delta", False)
        thresholds = _floats(st.get("bf_thresholds", ""))
        rscale = resolve_rscale(st.get("rscale", "medium"))
        balance = st.get("balance", "cyclic")
    except (ValueError, TypeError, InputError) as exc:
        raise ConfigError(f"[study]: {exc}") from exc
    if seed is None:
        raise ConfigError("[study] needs a seed")
    if balance not in ("cyclic", "truncate"):
        raise ConfigError(f"balance must be 'cyclic' or 'truncate', got {balance!r}")

    scenarios, notes = [], []
    designs = [s for s in parser.sections() if s.startswith("design")]
    if not designs:
        raise ConfigError("config needs at least one [design ...] section")
    for sec in designs:
        d = parser[sec]
        try:
            design = BalancedBinaryDesign(int(d["k"]))
            beta = _floats(d["beta"])
            sigmas = _floats(d["sigma_sq"])
            ns = _ints(d["n_obs"])
        except KeyError as exc:
            raise ConfigError(f"[{sec}] missing key {exc}") from exc
        for sigma_sq, n_req in itertools.product(sigmas, ns):
            n = n_req
            if not design.is_balanced(n_req):
                if balance == "truncate":
                    n = design.balanced_n(n_req)
                    notes.append(f"{sec}: N={n_req} truncated to {n} for balance over {design.cells} cells")
                else:
                    notes.append(f"{sec}: N={n_req} is not a multiple of {design.cells} cells; "
                                 f"filled round-robin, P^2 taken from the realized design")
            grid = deltas
            p2 = true_p_squared(beta, design, sigma_sq, n)
            if boundary and p2 > 0:
                grid = tuple(sorted(set(deltas) | {p2}))
            idx = len(scenarios)
            scenarios.append(Scenario(
                scenario_id=f"{name}-{idx:03d}", n_obs=n, design=design, beta=beta,
                sigma_sq=sigma_sq, delta_grid=grid, alpha=alpha, bf_thresholds=thresholds,
                replicates=reps, seed=scenario_seed(seed, idx), n_requested=n_req, rscale=rscale,
            ))
    return StudyConfig(name, tuple(scenarios), seed, reps, tuple(dict.fromkeys(notes)), text)


# --- output ------------------------------------------------------------------

CSV_FIELDS = [
    "scenario_id", "k", "n_requested", "n_obs", "sigma_sq", "beta", "true_p2", "seed", "alpha",
    "delta", "threshold", "replicates", "failures", "reject_rate", "reject_se", "power_formula",
    "nhst_rate", "cet_positive", "cet_negative", "cet_inconclusive", "cet_snm",
    "bf_positive", "bf_negative", "bf_inconclusive", "agreement", "contradiction", "mean_r2",
]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def result_rows(result: ScenarioResult) -> list[dict]:
    """One row per (delta, threshold); threshold is blank when no BF was run."""
    s, c = result.scenario, result.counts
    base = {
        "scenario_id": s.scenario_id, "k": s.k, "n_requested": s.n_requested or s.n_obs,
        "n_obs": s.n_obs, "sigma_sq": s.sigma_sq, "beta": ";".join(repr(b) for b in s.beta),
        "true_p2": s.true_p_squared, "seed": s.seed, "alpha": s.alpha,
        "replicates": c.ok + c.failures, "failures": c.failures,
        "nhst_rate": result.nhst_rate, "mean_r2": result.mean_r2,
    }
    rows = []
    thresholds = list(enumerate(s.bf_thresholds)) or [(None, None)]
    for di, d in enumerate(s.delta_grid):
        rate = result._rate(c.reject[di])
        for ti, t in thresholds:
            row = dict(base, delta=d, threshold=t, reject_rate=rate,
                       reject_se=ScenarioResult.se(rate, c.ok),
                       power_formula=result.power_formula.get(d, math.nan),
                       cet_snm=result._rate(c.cet_snm[di]))
            for lab, cnt in zip(_LABELS, c.cet[di]):
                row[f"cet_{lab}"] = result._rate(cnt)
            if ti is not None:
                for lab, cnt in zip(_LABELS, c.bf[ti]):
                    row[f"bf_{lab}"] = result._rate(cnt)
                row["agreement"] = result._rate(c.agree[di, ti])
                row["contradiction"] = result._rate(c.contra[di, ti])
            rows.append(row)
    return rows


def write_results_csv(results: Sequence[ScenarioResult], path: str | os.PathLike) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        for row in result_rows(r):
            writer.writerow({k: _fmt(row.get(k)) for k in CSV_FIELDS})
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_manifest(study: StudyConfig, results: Sequence[ScenarioResult], path: str | os.PathLike,
                   csv_name: str = "results.csv") -> dict:
    import json

    manifest = {
        "software": "noninf",
        "version": __version__,
        "study": study.name,
        "study_seed": study.seed,
        "replicates": study.replicates,
        "results_csv": csv_name,
        "rng": "numpy Philox, key = scenario seed, counter[3] = replicate index",
        "adjustments": list(study.adjustments),
        "scenarios": [
            {
                "scenario_id": r.scenario.scenario_id,
                "seed": r.scenario.seed,
                "k": r.scenario.k,
                "n_requested": r.scenario.n_requested,
                "n_obs": r.scenario.n_obs,
                "sigma_sq": r.scenario.sigma_sq,
                "beta": list(r.scenario.beta),
                "true_p2": r.scenario.true_p_squared,
                "failures": r.failures,
            }
            for r in results
        ],
        "config": study.source,
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def read_results_csv(path: str | os.PathLike) -> list[ScenarioResult]:
    """Rebuild results (with exact integer tallies) from a results CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"{path}: no result rows")
    missing = set(CSV_FIELDS) - set(rows[0])
    if missing:
        raise ConfigError(f"{path}: missing columns {sorted(missing)}")

    by_id: dict[str, list[dict]] = {}
    for row in rows:
        by_id.setdefault(row["scenario_id"], []).append(row)

    out = []
    for sid, group in by_id.items():
        first = group[0]
        deltas = tuple(dict.fromkeys(float(r["delta"]) for r in group))
        thresholds = tuple(dict.fromkeys(float(r["threshold"]) for r in group if r["threshold"]))
        failures = int(first["failures"])
        reps = int(first["replicates"])
        ok = reps - failures
        beta = tuple(float(b) for b in first["beta"].split(";"))
        scenario = Scenario(
            scenario_id=sid, n_obs=int(first["n_obs"]), design=BalancedBinaryDesign(int(first["k"])),
            beta=beta, sigma_sq=float(first["sigma_sq"]), delta_grid=deltas, alpha=float(first["alpha"]),
            bf_thresholds=thresholds, replicates=reps, seed=int(first["seed"]),
            n_requested=int(first["n_requested"]),
        )
        cnt = lambda v: int(round(float(v) * ok))  # noqa: E731
        counts = _Counts(len(deltas), len(thresholds), ok=ok, failures=failures,
                         nhst_reject=cnt(first["nhst_rate"]), sum_r2=float(first["mean_r2"]) * ok)
        power = {}
        for r in group:
            di = deltas.index(float(r["delta"]))
            counts.reject[di] = cnt(r["reject_rate"])
            counts.cet_snm[di] = cnt(r["cet_snm"])
            counts.cet[di] = [cnt(r[f"cet_{lab}"]) for lab in _LABELS]
            power[deltas[di]] = float(r["power_formula"])
            if r["threshold"]:
                ti = thresholds.index(float(r["threshold"]))
                counts.bf[ti] = [cnt(r[f"bf_{lab}"]) for lab in _LABELS]
                counts.agree[di, ti] = cnt(r["agreement"])
                counts.contra[di, ti] = cnt(r["contradiction"])
        out.append(ScenarioResult(scenario, counts, power))
    return out


def with_replicates(scenario: Scenario, replicates: int) -> Scenario:
    return replace(scenario, replicates=replicates)
