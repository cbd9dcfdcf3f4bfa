"""Round-trip convergence experiment.

For each chosen circle density: build the star-shaped domain, project the
harmonic measure back from the center at a ladder of walk counts, and report
the KS distance to the input measure per seed.  The summary row shows the
observed mean and the 1/sqrt(N) reference slope.

Example:
    python scripts/roundtrip_convergence.py --measures cosine --walks 20000 40000
"""

import argparse
import sys

import numpy as np

from starproj.construction import build_domain
from starproj.families import builtin_szego_measures
from starproj.harmonic_measure import WalkConfig, ks_distance, wos_project


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--measures", nargs="+", default=["cosine"],
                        choices=sorted(builtin_szego_measures()))
    parser.add_argument("--walks", type=int, nargs="+",
                        default=[25_000, 50_000, 100_000])
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--eps", type=float, default=1.0e-4)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    catalog = builtin_szego_measures()
    for name in args.measures:
        nu = catalog[name]
        domain = build_domain(nu)
        print(f"{name}: domain with {domain.samples} boundary samples")
        print(f"  {'walks':>8}  " + "  ".join(f"seed{s:<2}" for s in range(args.seeds))
              + "    mean")
        base = None
        for walks in args.walks:
            ks = []
            for seed in range(args.seeds):
                cfg = WalkConfig(walks=walks, eps=args.eps, seed=seed,
                                 workers=args.workers)
                ks.append(ks_distance(wos_project(domain, 0.0, cfg), nu))
            mean = float(np.mean(ks))
            if base is None:
                base = (walks, mean)
            ref = base[1] * np.sqrt(base[0] / walks)
            print(f"  {walks:>8}  " + "  ".join(f"{v:.4f}" for v in ks)
                  + f"  {mean:.4f}  (1/sqrt(N) ref {ref:.4f})")
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
