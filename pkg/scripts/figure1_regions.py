#!/usr/bin/env python3
"""R^2 boundaries of the CET and Bayes factor conclusion regions.

For K in {1, 5, 12} and 76 log-spaced N from 30 to 1000, writes the R^2 at
which NHST becomes significant, below which the non-inferiority test
rejects, and at which the BF reaches the threshold and its reciprocal.
"""

import argparse

from noninf.figures import region_rows, write_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.10)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--threshold", type=float, default=3.0)
    ap.add_argument("--out", default="out/regions.csv")
    args = ap.parse_args()

    rows = region_rows((1, 5, 12), delta=args.delta, alpha=args.alpha, threshold=args.threshold)
    write_rows(rows, args.out)

    for k in (1, 5, 12):
        ks = [r for r in rows if r["k"] == k]
        closed = [r["n_obs"] for r in ks if not r["inconclusive_possible"]]
        odd = [r["n_obs"] for r in ks if min(r["r2_noninf"], r["r2_nhst"]) > args.delta]
        print(f"K={k:<3} inconclusive impossible from N={min(closed) if closed else '-'}; "
              f"negative with R^2 > delta reachable at N={odd[:1] + odd[-1:] if odd else '-'}")


if __name__ == "__main__":
    main()
