"""How ||1_J a||_{U^s} tracks ||a||_{U^s} for random and arithmetic signals.

For intervals J = [0, fN) of growing fraction f, writes CSV:
signal,fraction,s,full,restricted.
"""
import argparse
import csv
import sys

import numpy as np

from hofa.arith import liouville, moebius, next_prime, tabulate
from hofa.gowers import restriction_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    Nt = next_prime(args.N)
    rng = np.random.default_rng(args.seed)
    sig = {"random": np.exp(2j * np.pi * rng.random(Nt)),
           "liouville": tabulate(liouville(), args.N).embed(Nt),
           "moebius": tabulate(moebius(), args.N).embed(Nt)}
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["signal", "fraction", "s", "full", "restricted"])
    for frac in (0.1, 0.25, 0.5, 0.75, 1.0):
        hi = int(frac * Nt)
        rows = restriction_report(list(sig.values()), 0, hi, args.s)
        for name, (full, res) in zip(sig, rows):
            w.writerow([name, frac, args.s, f"{full:.12g}", f"{res:.12g}"])


if __name__ == "__main__":
    main()
