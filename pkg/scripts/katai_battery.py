"""Kátai criterion battery: pair-correlation maxima against the correlation sup.

Signals: linear phases with rational and irrational slopes, a quadratic phase,
Liouville itself and a random phase sequence.  Writes CSV:
signal,maxEntry,sup,finding.
"""
import argparse
import csv
import math
import sys

import numpy as np

from hofa.arith import standard_family, tabulate, liouville
from hofa.katai import katai_battery


def signals(N, seed):
    n = np.arange(1, N + 1)
    rng = np.random.default_rng(seed)
    return {
        "e(n/3)": np.exp(2j * np.pi * n / 3),
        "e(n*sqrt2)": np.exp(2j * np.pi * n * math.sqrt(2)),
        "e(n^2*sqrt3)": np.exp(2j * np.pi * np.mod(n * n * math.sqrt(3), 1.0)),
        "liouville": tabulate(liouville(), N).values,
        "random": np.exp(2j * np.pi * rng.random(N)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=100_000)
    ap.add_argument("--K", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = katai_battery(signals(args.N, args.seed), standard_family(), K=args.K)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["signal", "maxEntry", "sup", "finding"])
    for r in rows:
        w.writerow([r["signal"], f"{r['maxEntry']:.12g}", f"{r['sup']:.12g}", str(r["finding"]).lower()])


if __name__ == "__main__":
    main()
