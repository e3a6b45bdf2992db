#!/usr/bin/env python3
"""Monte Carlo decay curve for the measure-zero boundary case.

Estimates the fraction of length-n weight walks that never go negative (the
depth-n shadow of the rho = 1/2 heavy set) over a range of horizons, next to
the C(n, n/2) 2^-n closed form it should track.  The fraction decays like
1/sqrt(n), consistent with the set having Lebesgue measure zero.

Usage: python scripts/phase_transition.py --trials 200000 --seed 1
"""

import argparse
import math

from polarfractal.fractal import walk_min_nonnegative_fraction


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizons", default="10,30,100,300,1000")
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    print("n,fraction_min_nonnegative,closed_form")
    for token in args.horizons.split(","):
        n = int(token)
        frac = walk_min_nonnegative_fraction(n, args.trials, args.seed,
                                             args.threads)
        even = n if n % 2 == 0 else n - 1
        closed = math.comb(even, even // 2) / 2.0**even
        print(f"{n},{frac:.17g},{closed:.17g}")


if __name__ == "__main__":
    main()
