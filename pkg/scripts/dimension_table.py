"""Table of fiber dimensions against the class-number bounds, one row per
dihedral or reducible fiber, for a range of levels."""

import argparse

import sympy

from mod2hecke.classify import classify_level
from mod2hecke.quadlattice import class_group, imaginary_disc, real_disc


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--from", dest="n_from", type=int, default=3)
    ap.add_argument("--to", dest="n_to", type=int, default=199)
    args = ap.parse_args()

    print(f"{'N':>5} {'mod8':>4} {'g':>3} {'h-':>4} {'h_even':>6} {'h+':>4}  kind               ord  dim")
    for N in sympy.primerange(max(3, args.n_from), args.n_to + 1):
        data, classes = classify_level(N)
        Gi, Gr = class_group(imaginary_disc(N)), class_group(real_disc(N))
        for c in classes:
            if c.kind == "Other":
                continue
            print(f"{N:>5} {N % 8:>4} {data.genus:>3} {Gi.h:>4} {Gi.h_even:>6} {Gr.h:>4}  "
                  f"{c.kind:<18} {str(c.ordinary):<5}{c.dimension:>3}")


if __name__ == "__main__":
    main()
