"""Sector identity residual versus quadrature refinement.

For each harmonic builtin the four-term identity holds exactly, so the
printed residual is pure quadrature error; the observed order should sit at
4 (composite Simpson) until rounding noise takes over.

Example:
    python scripts/carleman_orders.py --sector 0.5 2.0 0.1
"""

import argparse
import sys

import numpy as np

from starproj.harness import (
    SectorSpec,
    builtin_test_functions,
    carleman_identity_residual,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sector", type=float, nargs=3, default=(0.5, 2.0, 0.1),
                        metavar=("r", "R", "a"))
    parser.add_argument("--levels", type=int, nargs="+",
                        default=[64, 128, 256, 512, 1024])
    args = parser.parse_args(argv)

    sector = SectorSpec(*args.sector)
    harmonics = {
        name: u for name, u in builtin_test_functions().items()
        if u.variant == "harmonic-poly"
    }
    print(f"sector r={sector.r} R={sector.R} a={sector.a} (b={sector.b:.4f})")
    header = f"{'function':<10}" + "".join(f" {n:>10}" for n in args.levels) + "   orders"
    print(header)
    floor = 1.0e-15  # below this the residual is rounding noise, not h^4
    for name, u in harmonics.items():
        res = [carleman_identity_residual(u, sector, n) for n in args.levels]
        orders = [
            f"{np.log2(res[i] / res[i + 1]):.1f}"
            if min(res[i], res[i + 1]) > floor else "-"
            for i in range(len(res) - 1)
        ]
        print(f"{name:<10}" + "".join(f" {r:>10.2e}" for r in res)
              + "   " + " ".join(orders))
    return 0


if __name__ == "__main__":
    sys.exit(main())
