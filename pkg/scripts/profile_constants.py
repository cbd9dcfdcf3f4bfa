"""Fitted growth constants across the builtin test functions.

Runs the angular-integral profile for every builtin function against one
circle density, then the half-plane check on [0, pi] and the vertical-line
profile on [-1, 1] for the same function family.  All constants the theorems
promise to be finite are printed; nothing in this sweep should come out
unbounded.

Example:
    python scripts/profile_constants.py --measure cosine -A 2.0
"""

import argparse
import sys

import numpy as np

from starproj.families import resolve_measure
from starproj.harness import (
    builtin_test_functions,
    levinson_profile,
    phragmen_check,
    theorem1_profile,
)

TWO_PI = 2.0 * np.pi


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--measure", default="cosine")
    parser.add_argument("-A", "--dilation", type=float, default=2.0)
    parser.add_argument("--t-min", type=float, default=0.11)
    parser.add_argument("--t-max", type=float, default=0.93)
    parser.add_argument("--samples", type=int, default=8)
    args = parser.parse_args(argv)

    fns = builtin_test_functions()
    nu_circle = resolve_measure(args.measure, (0.0, TWO_PI))
    nu_half = resolve_measure(args.measure, (0.0, np.pi))
    nu_line = resolve_measure(args.measure, (-1.0, 1.0))
    grid = np.geomspace(args.t_min, args.t_max, args.samples)
    half_grid = np.geomspace(0.5, 50.0, 10)
    line_grid = np.linspace(-0.9, 0.9, 13)

    print(f"measure {args.measure!r}, dilation A={args.dilation}")
    print(f"{'function':<18} {'c_fit':>10}  {'H1':>3} {'H2':>3} {'C':>3} "
          f"{'viol':>4}  {'sup_V':>8} {'sup_K':>8}")
    flag = lambda b: "y" if b else "."
    for name, u in fns.items():
        rep = theorem1_profile(u, nu_circle, grid, A=args.dilation)
        c = "unbounded" if rep.unbounded else f"{rep.c_fit:.4f}"
        ph = phragmen_check(u, nu_half, half_grid)
        try:
            lv = levinson_profile(u, nu_line, line_grid)
            sup_v, sup_k = f"{lv.sup_V:.4f}", f"{lv.sup_K:.4f}"
        except ZeroDivisionError:
            # a declared zero of u sits on the sampled rectangle
            sup_v, sup_k = "sing", "sing"
        print(f"{name:<18} {c:>10}  {flag(ph.h1_boundary):>3} {flag(ph.h2_decay):>3} "
              f"{flag(ph.conclusion):>3} {flag(ph.violation):>4}  "
              f"{sup_v:>8} {sup_k:>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
