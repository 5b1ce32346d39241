"""Energy-increment step over a nested kernel chain for a small family.

Writes CSV: step,Q,W,energy and reports the chosen j0 with the U^2 norms of
the uniform parts on stderr.
"""
import argparse
import csv
import sys

from hofa.arith import dirichlet, liouville, moebius, next_prime, tabulate
from hofa.structure import KernelParams, energy_increment, structured_kernel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=5000)
    args = ap.parse_args()
    Nt = next_prime(2 * args.N)
    steps = [(1, 2), (2, 8), (6, 36), (24, 192), (120, 1200)]
    chain = [structured_kernel(KernelParams(Nt, q, w)) for q, w in steps if 2 * w < Nt]
    fam = [liouville(), moebius(), dirichlet(3, 1)]
    tables = [tabulate(f, args.N) for f in fam]
    res = energy_increment(tables, [1 / len(fam)] * len(fam), chain)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["step", "Q", "W", "energy"])
    for j, e in enumerate(res.energies):
        w.writerow([j, chain[j].Q, chain[j].W, f"{e:.12g}"])
    print(f"j0={res.j0}", file=sys.stderr)
    for f, d in zip(fam, res.decompositions):
        print(f"{f.label}: u2(fun)={d.report.u2_uniform:.6g}", file=sys.stderr)


if __name__ == "__main__":
    main()
