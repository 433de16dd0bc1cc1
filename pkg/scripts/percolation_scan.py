"""Scan the largest-cluster fraction and degeneracy bound across p on a 2-D lattice.

    python scripts/percolation_scan.py --L 64 --trials 200 --out theta.csv
"""
import argparse
import csv

import numpy as np

from ffspin.percolation import theta_curve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--L", type=int, default=64)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--step", type=float, default=0.02)
    ap.add_argument("--out")
    args = ap.parse_args()

    ps = np.arange(0.0, 1.0 + args.step / 2, args.step)
    c = theta_curve(args.d, args.L, ps, args.trials, args.seed)
    n = args.L ** args.d
    print(f"{'p':>6} {'theta':>8} {'bound/n':>9}")
    for p, t, b in zip(c.ps, c.theta, c.bound):
        print(f"{p:6.2f} {t:8.4f} {b / n:9.4f}")
    print(f"onset ~ {c.onset:.3f}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p", "theta", "bound"])
            w.writerows(zip(c.ps, c.theta, c.bound))


if __name__ == "__main__":
    main()
