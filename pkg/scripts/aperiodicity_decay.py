"""U^2[N] and U^3[N] norms of aperiodic and periodic functions for N = 2^k.

Writes CSV: function,N,s,norm.  Aperiodic functions should decay, the
principal character and χ mod 3 should not.
"""
import argparse
import csv
import sys

from hofa.arith import build_sieve, dirichlet, liouville, moebius, principal, tabulate
from hofa.gowers import gowers_norm_interval


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmin", type=int, default=8)
    ap.add_argument("--kmax", type=int, default=14)
    ap.add_argument("--s", type=int, nargs="+", default=[2])
    args = ap.parse_args()
    sieve = build_sieve(2 ** args.kmax)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["function", "N", "s", "norm"])
    for f in (liouville(), moebius(), dirichlet(3, 1), principal()):
        for k in range(args.kmin, args.kmax + 1):
            vals = tabulate(f, 2 ** k, sieve).values
            for s in args.s:
                w.writerow([f.label, 2 ** k, s, f"{gowers_norm_interval(vals, s):.12g}"])


if __name__ == "__main__":
    main()
