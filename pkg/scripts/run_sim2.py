#!/usr/bin/env python3
"""Simulation study 2: CET against the JZS Bayes factor.

Writes results.csv, manifest.json and conclusion_curves.csv, then prints the
average agreement (same conclusion) and contradiction (one positive, one
negative) rates over all scenarios for each margin and evidence threshold.

    python3 scripts/run_sim2.py --replicates 1000 --out out/sim2
"""

import argparse
from pathlib import Path

from noninf.figures import simulation_curve_rows, write_rows
from noninf.simulation import agreement_summary, load_study, run_study, write_manifest, write_results_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="sim2.cfg")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--full", action="store_true", help="5,000 replicates per scenario")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="out/sim2")
    args = ap.parse_args()

    study = load_study(args.config, replicates=args.replicates, full=args.full)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_study(study.scenarios, workers=args.threads)
    write_results_csv(results, out / "results.csv")
    write_manifest(study, results, out / "manifest.json")
    write_rows(simulation_curve_rows(out / "results.csv", "agreement"), out / "conclusion_curves.csv")

    s0 = study.scenarios[0]
    deltas, thresholds = s0.delta_grid, s0.bf_thresholds
    for title, col in (("agreement", 0), ("contradiction", 1)):
        print(f"\n{title} ({len(results)} scenarios x {study.replicates} replicates)")
        print("delta   " + "".join(f"BF {t:g}".rjust(9) for t in thresholds))
        for d in deltas:
            cells = [agreement_summary(results, d, t)[col] for t in thresholds]
            print(f"{d:<8g}" + "".join(f"{c:9.3f}" for c in cells))
    failures = sum(r.failures for r in results)
    if failures:
        print(f"\n{failures} replicate(s) failed numerically (excluded from rates)")


if __name__ == "__main__":
    main()
