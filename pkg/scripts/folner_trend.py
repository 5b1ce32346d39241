"""Multiplicative Følner densities and dilation defects as M grows.

Writes CSV: M,size,odd,mult6,defect_2,defect_3/2.  The defects shrink like
2/(M+1), the trend behind dilation invariance.
"""
import csv
import sys

from hofa.parreg import dilation_defect, folner_set, mult_density


def main():
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["M", "size", "odd", "mult6", "defect_2", "defect_3/2"])
    for M in range(1, 7):
        w.writerow([M, len(folner_set(M)),
                    f"{mult_density(lambda n: n % 2 == 1, M):.12g}",
                    f"{mult_density(lambda n: n % 6 == 0, M):.12g}",
                    f"{dilation_defect(2, 1, M):.12g}",
                    f"{dilation_defect(3, 2, M):.12g}"])


if __name__ == "__main__":
    main()
