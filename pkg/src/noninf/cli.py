"""Command-line front end.

Every command prints a JSON report ``{command, version, inputs, results,
warnings}`` on stdout (or a short human-readable summary with ``--human``).
Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .bayes import QuadratureError, bf_decide, jzs_bf_regression
from .distributions import ConvergenceError, DomainError
from .figures import region_rows, write_rows
from .inference import (
    Design,
    cet_decide,
    eta_sq_upper_ci,
    inconclusive_possible,
    nhst_anova,
    nhst_regression,
    noninf_anova_hom,
    noninf_anova_welch,
    noninf_regression,
    power_noninf,
)
from .model_fit import (
    GroupSummary,
    InputError,
    anova_from_data,
    anova_from_summaries,
    fit_regression,
    regression_from_r2,
)
from .simulation import (
    ConfigError,
    agreement_summary,
    load_study,
    read_results_csv,
    run_study,
    write_manifest,
    write_results_csv,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
THREADS_ENV = "NONINF_THREADS"
_MISSING = {"", "na", "nan", "null", "none", "."}


class UsageError(Exception):
    """Bad flags or input tables; maps to exit code 2."""


# --- input -------------------------------------------------------------------


def read_table(source: str) -> dict[str, list[str]]:
    """Read a comma-separated table with a header row from a path or ``-``.

    Rows with missing cells are rejected, listing their line numbers.
    """
    try:
        if source == "-":
            text = sys.stdin.read()
        else:
            text = Path(source).read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise UsageError(f"{source}: no such file")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{source}: cannot read ({exc})")
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise UsageError(f"{source}: empty input")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise UsageError(f"{source}: duplicate column names")
    body = rows[1:]
    if not body:
        raise UsageError(f"{source}: header but no data rows")
    bad = [
        i + 2 for i, r in enumerate(body)
        if len(r) != len(header) or any(c.strip().lower() in _MISSING for c in r)
    ]
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise UsageError(f"{source}: missing or extra values on line(s) {shown}")
    return {h: [r[j].strip() for r in body] for j, h in enumerate(header)}


def _column(table: dict, name: str, numeric: bool = True):
    if name not in table:
        raise UsageError(f"column {name!r} not found (have {', '.join(table)})")
    values = table[name]
    if not numeric:
        return values
    out = []
    for i, v in enumerate(values):
        try:
            x = float(v)
        except ValueError:
            raise UsageError(f"column {name!r}, line {i + 2}: not a number: {v!r}")
        if not math.isfinite(x):
            raise UsageError(f"column {name!r}, line {i + 2}: non-finite value")
        out.append(x)
    return out


def parse_summaries(text: str) -> list[GroupSummary]:
    """``"n,mean,sd;n,mean,sd;..."`` into group summaries."""
    groups = []
    for j, part in enumerate(p for p in text.split(";") if p.strip()):
        fields = [f.strip() for f in part.split(",")]
        if len(fields) != 3:
            raise UsageError(f"group {j + 1}: expected n,mean,sd, got {part!r}")
        try:
            n = int(fields[0])
            mean, sd = float(fields[1]), float(fields[2])
        except ValueError:
            raise UsageError(f"group {j + 1}: cannot parse {part!r}")
        groups.append(GroupSummary(n, mean, sd if n > 1 else None))
    if len(groups) < 2:
        raise UsageError("--summaries needs at least two groups")
    return groups


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _prob(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {v}")
    return v


# --- output ------------------------------------------------------------------


def fmt(x) -> str:
    """3 significant figures; scientific below 1e-4."""
    if x is None:
        return "NA"
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if math.isnan(x) or math.isinf(x) or x == 0:
        return repr(x) if x else "0"
    if abs(x) < 1e-4:
        return f"{x:.2e}"
    return f"{float(f'{x:.3g}'):g}" if abs(x) < 1e6 else f"{x:.2e}"


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def report(command: str, inputs: dict, results, notes=()) -> dict:
    return {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "results": results,
        "warnings": list(notes),
    }


def _human_lines(results, indent="") -> list[str]:
    lines = []
    if isinstance(results, list):
        for i, item in enumerate(results):
            lines.append(f"{indent}[{i}]")
            lines.extend(_human_lines(item, indent + "  "))
        return lines
    for k, v in results.items():
        if isinstance(v, (dict, list)):
            lines.append(f"{indent}{k}:")
            lines.extend(_human_lines(v, indent + "  "))
        else:
            lines.append(f"{indent}{k}: {fmt(v)}")
    return lines


def emit(rep: dict, human: bool, out=None) -> None:
    out = out or sys.stdout
    if human:
        print(f"{rep['command']} (noninf {rep['version']})", file=out)
        print("\n".join(_human_lines(rep["results"], "  ")), file=out)
        for w in rep["warnings"]:
            print(f"  warning: {w}", file=out)
    else:
        json.dump(_jsonable(rep), out, indent=2, allow_nan=False)
        out.write("\n")


# --- commands ----------------------------------------------------------------


def _cet_block(nhst, noninf, eta_u, alpha, delta) -> dict:
    d = cet_decide(nhst.p_value, noninf.p_value, alpha)
    return {
        "F": nhst.statistic,
        "df1": nhst.df1,
        "df2": nhst.df2,
        "ncp": noninf.ncp_used,
        "p_nhst": nhst.p_value,
        "p_noninf": noninf.p_value,
        "effect_upper": eta_u,
        "effect_upper_below_delta": eta_u < delta,
        "decision": d.label.value,
        "significant_yet_not_meaningful": d.significant_yet_not_meaningful,
        "p_noninf_underflow": noninf.underflow,
    }


def cmd_test(args) -> tuple[object, list[str]]:
    raw = args.data is not None
    if args.design == "regression":
        summary_flags = [args.r2, args.n, args.k]
        if raw == any(v is not None for v in summary_flags):
            raise UsageError("give either --data (with --y/--x) or --r2/--n/--k, not both or neither")
        if raw:
            if not args.y or not args.x:
                raise UsageError("--data needs --y and --x")
            table = read_table(args.data)
            y = _column(table, args.y)
            xs = [_column(table, c) for c in args.x.split(",") if c]
            s = fit_regression(y, list(zip(*xs)))
        else:
            if None in summary_flags:
                raise UsageError("summary input needs all of --r2, --n, --k")
            s = regression_from_r2(args.r2, args.n, args.k)
        nhst = nhst_regression(s, args.alpha)
        noninf = noninf_regression(s, args.delta, args.alpha)
        eta_u = eta_sq_upper_ci(s.f_stat, s.df1, s.df2, s.n_obs, args.alpha)
        res = {"n_obs": s.n_obs, "k": s.n_predictors, "r_squared": s.r_squared,
               "perfect_fit": s.perfect_fit}
        res.update(_cet_block(nhst, noninf, eta_u, args.alpha, args.delta))
        return res, []

    if raw == (args.summaries is not None):
        raise UsageError("give either --data (with --y/--group) or --summaries, not both or neither")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if raw:
            if not args.y or not args.group:
                raise UsageError("--data needs --y and --group")
            table = read_table(args.data)
            labels = _column(table, args.group, numeric=False)
            if len(set(labels)) < 2:
                raise UsageError(f"group column {args.group!r} has fewer than 2 levels")
            a = anova_from_data(_column(table, args.y), labels)
        else:
            a = anova_from_summaries(parse_summaries(args.summaries))
    welch = args.variant == "welch"
    nhst = nhst_anova(a, args.alpha, welch=welch)
    if welch:
        noninf = noninf_anova_welch(a, args.delta, args.alpha)
    else:
        noninf = noninf_anova_hom(a, args.delta, args.alpha)
    eta_u = eta_sq_upper_ci(nhst.statistic, nhst.df1, nhst.df2, a.n_obs, args.alpha)
    res = {
        "n_obs": a.n_obs, "n_groups": a.n_groups, "variant": args.variant,
        "ss_between": a.ss_between, "ss_within": a.ss_within,
        "eta_sq_hat": a.eta_sq_hat, "epsilon_sq_hat": a.epsilon_sq_hat, "omega_sq_hat": a.omega_sq_hat,
        "welch_F": a.welch_f, "welch_df2": a.welch_df2,
    }
    res.update(_cet_block(nhst, noninf, eta_u, args.alpha, args.delta))
    return res, list(a.warnings)


def cmd_power(args) -> tuple[object, list[str]]:
    if (args.k is None) == (args.j is None):
        raise UsageError("give exactly one of --k (regression) or --j (ANOVA groups)")
    kind = Design.REGRESSION if args.k is not None else Design.ANOVA
    size = args.k if args.k is not None else args.j
    rows = []
    for n in args.n:
        rows.append({
            "n_obs": n,
            "power": power_noninf(n, size, args.delta, args.alpha, kind),
            "inconclusive_possible": inconclusive_possible(n, size, args.delta, args.alpha, kind),
        })
    return rows, []


def cmd_ci(args) -> tuple[object, list[str]]:
    if args.df1 < 1 or args.df2 < 1 or args.f < 0 or args.n < 1:
        raise UsageError("need F >= 0, df1 >= 1, df2 >= 1, N >= 1")
    return {"effect_upper": eta_sq_upper_ci(args.f, args.df1, args.df2, args.n, args.alpha),
            "confidence": 1 - args.alpha}, []


def cmd_bf(args) -> tuple[object, list[str]]:
    if args.threshold <= 1:
        raise UsageError("--threshold must exceed 1")
    s = regression_from_r2(args.r2, args.n, args.k)
    b = jzs_bf_regression(s, args.rscale, args.threshold)
    return {"bf10": b.bf10, "log_bf10": b.log_bf10, "rscale": b.rscale,
            "threshold": b.threshold, "decision": bf_decide(b).label.value}, []


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not an integer")
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def cmd_simulate(args) -> tuple[object, list[str]]:
    workers = _threads(args)
    study = load_study(args.config, replicates=args.replicates, full=args.full)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_study(study.scenarios, workers=workers)
    csv_path, manifest_path = out / "results.csv", out / "manifest.json"
    write_results_csv(results, csv_path)
    write_manifest(study, results, manifest_path, csv_path.name)
    failures = sum(r.failures for r in results)
    notes = list(study.adjustments)
    if failures:
        notes.append(f"{failures} replicate(s) failed numerically and were excluded from rates")
    return {"study": study.name, "scenarios": len(results), "replicates": study.replicates,
            "workers": workers, "failures": failures,
            "results_csv": str(csv_path), "manifest": str(manifest_path)}, notes


def cmd_agree(args) -> tuple[object, list[str]]:
    results = read_results_csv(args.results)
    try:
        agree, contra = agreement_summary(results, args.delta, args.threshold)
    except ValueError as exc:
        raise UsageError(str(exc))
    return {"delta": args.delta, "threshold": args.threshold, "scenarios": len(results),
            "agreement": agree, "contradiction": contra}, []


def cmd_regions(args) -> tuple[object, list[str]]:
    rows = region_rows(args.k, delta=args.delta, alpha=args.alpha, threshold=args.threshold)
    write_rows(rows, args.out)
    return {"rows": len(rows), "out": args.out}, []


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noninf", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"noninf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        sp.add_argument("--alpha", type=_prob, default=0.05)
        if delta:
            sp.add_argument("--delta", type=_prob, required=True,
                            help="margin for the effect size; must be chosen before seeing data")
        sp.add_argument("--human", action="store_true", help="short text output instead of JSON")

    t = sub.add_parser("test", help="NHST, non-inferiority test, upper CI bound and CET decision")
    t.add_argument("design", choices=["regression", "anova"])
    t.add_argument("--data", help="CSV file with a header row, or - for stdin")
    t.add_argument("--y", help="outcome column")
    t.add_argument("--x", help="comma-separated covariate columns (regression)")
    t.add_argument("--group", help="group column (anova)")
    t.add_argument("--r2", type=float)
    t.add_argument("--n", type=int)
    t.add_argument("--k", type=int)
    t.add_argument("--summaries", help='per-group "n,mean,sd;n,mean,sd;..." (anova)')
    t.add_argument("--variant", choices=["hom", "welch"], default="hom")
    common(t)
    t.set_defaults(func=cmd_test)

    pw = sub.add_parser("power", help="power of the non-inferiority test when the effect is 0")
    pw.add_argument("--n", type=_int_list, required=True, help="sample size(s), comma-separated")
    pw.add_argument("--k", type=int, help="number of covariates (regression)")
    pw.add_argument("--j", type=int, help="number of groups (anova)")
    common(pw)
    pw.set_defaults(func=cmd_power)

    ci = sub.add_parser("ci", help="upper bound of the one-sided interval for P^2 / eta^2")
    ci.add_argument("--f", type=float, required=True)
    ci.add_argument("--df1", type=float, required=True)
    ci.add_argument("--df2", type=float, required=True)
    ci.add_argument("--n", type=int, required=True)
    common(ci, delta=False)
    ci.set_defaults(func=cmd_ci)

    bf = sub.add_parser("bf", help="JZS Bayes factor from R^2, N, K")
    bf.add_argument("--r2", type=float, required=True)
    bf.add_argument("--n", type=int, required=True)
    bf.add_argument("--k", type=int, required=True)
    bf.add_argument("--rscale", default="medium", help="'medium' or a positive number")
    bf.add_argument("--threshold", type=float, default=3.0)
    bf.add_argument("--human", action="store_true")
    bf.set_defaults(func=cmd_bf)

    sm = sub.add_parser("simulate", help="run a simulation study config")
    sm.add_argument("config", help="config path or a shipped preset name (sim1.cfg, sim2.cfg)")
    sm.add_argument("--replicates", type=int)
    sm.add_argument("--full", action="store_true", help="use the config's full_replicates")
    sm.add_argument("--out", default="results")
    sm.add_argument("--threads", type=int, help=f"worker processes (default ${THREADS_ENV} or 1)")
    sm.add_argument("--human", action="store_true")
    sm.set_defaults(func=cmd_simulate)

    ag = sub.add_parser("agree", help="average CET / BF agreement from a results CSV")
    ag.add_argument("--results", required=True)
    ag.add_argument("--delta", type=_prob, required=True)
    ag.add_argument("--threshold", type=float, required=True)
    ag.add_argument("--human", action="store_true")
    ag.set_defaults(func=cmd_agree)

    rg = sub.add_parser("regions", help="R^2 boundaries of the CET and BF conclusion regions (CSV)")
    rg.add_argument("--k", type=_int_list, default=[1, 5, 12])
    rg.add_argument("--threshold", type=float, default=3.0)
    rg.add_argument("--out", required=True)
    common(rg)
    rg.set_defaults(func=cmd_regions)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "human", "command")}
    if getattr(args, "replicates", None) is not None and args.replicates < 1:
        print("noninf: error: --replicates must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        results, notes = args.func(args)
    except (UsageError, InputError, ConfigError, DomainError) as exc:
        print(f"noninf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, QuadratureError, ArithmeticError) as exc:
        print(f"noninf {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    emit(report(args.command, inputs, results, notes), args.human)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
