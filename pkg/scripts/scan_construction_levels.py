"""List primes N = 1 mod 8 with Cl(-4N) of nontrivial odd part, and run the
group-ring construction at the first few of them."""

import argparse

import sympy

from mod2hecke.quadlattice import class_group
from mod2hecke.verify import verify_construction_imaginary


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cap", type=int, default=499)
    ap.add_argument("--run", type=int, default=3, help="how many levels to run the construction at")
    args = ap.parse_args()

    levels = []
    for N in sympy.primerange(3, args.cap + 1):
        if N % 8 != 1:
            continue
        G = class_group(-4 * N)
        print(f"N={N:>5} h={G.h:>3} h_even={G.h_even:>3} h_odd={G.h_odd:>3}")
        if G.h_odd > 1:
            levels.append(N)
    print("levels with odd class part:", levels)
    for N in levels[:args.run]:
        res = verify_construction_imaginary(N)
        for c in res["characters"]:
            print(f"N={N} order={c['order']} matched fiber={c['matched_fiber']} "
                  f"image {c['image_dim']}/{c['group_ring_dim']} -> {'pass' if c['pass'] else 'FAIL'}")


if __name__ == "__main__":
    main()
