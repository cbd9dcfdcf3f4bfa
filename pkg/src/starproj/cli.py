"""Command-line front end.

Every subcommand reads plain CSV inputs, runs one scenario, and emits a
machine-readable report (JSON by default, CSV for the curve-shaped ones).
Reports embed the resolved configuration, so identical invocations produce
byte-identical output; exit codes separate scientific verdicts (1) from
usage errors (2).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from .construction import (
    ClassMembershipError,
    GeometryError,
    build_domain,
    read_domain_csv,
    write_domain_csv,
)
from .families import _BUILTIN_MEASURES, resolve_measure
from .harness import (
    MatsaevWeight,
    SectorSpec,
    TestFunction,
    UnsupportedFunctionError,
    builtin_test_functions,
    carleman_identity_residual,
    levinson_profile,
    matsaev_profile,
    matsaev_weight,
    phragmen_check,
    psi_weight,
    theorem1_profile,
)
from .harmonic_measure import WalkConfig, ks_distance, wos_project
from .measures import (
    InvalidMeasureError,
    condition_integral,
    defect_sequence,
    read_density_csv,
    read_measure_csv,
)

TWO_PI = 2.0 * np.pi

_PHI_CHOICES = {
    "one": lambda t: np.ones_like(np.asarray(t, dtype=float)),
    "t": lambda t: np.asarray(t, dtype=float),
    "t2": lambda t: np.asarray(t, dtype=float) ** 2,
}


def _load_measure(spec, segment=None):
    """A positional measure argument is a CSV path or a built-in name."""
    if os.path.exists(spec):
        m = read_measure_csv(spec)
        if segment is not None:
            a, b = segment
            if abs(m.a - a) > 1e-9 or abs(m.b - b) > 1e-9:
                raise InvalidMeasureError(
                    f"{spec}: measure must live on [{a:g}, {b:g}], got [{m.a:g}, {m.b:g}]"
                )
        return m
    if spec in _BUILTIN_MEASURES:
        return resolve_measure(spec, segment)
    raise InvalidMeasureError(
        f"no such file or built-in measure: {spec!r} (built-ins: {sorted(_BUILTIN_MEASURES)})"
    )


def _load_function(name) -> TestFunction:
    fns = builtin_test_functions()
    if name not in fns:
        raise ValueError(f"unknown test function {name!r}; choices: {sorted(fns)}")
    return fns[name]


def _walk_config(args) -> WalkConfig:
    return WalkConfig(walks=args.walks, eps=args.eps, seed=args.seed,
                      workers=args.workers, bins=args.bins)


def _emit(args, report: dict, csv_rows=None, csv_header=None):
    """Write the report as deterministic JSON or CSV to -o / stdout."""
    if args.format == "csv":
        buf = io.StringIO()
        if csv_rows is None:
            csv_header = ["key", "value"]
            csv_rows = [(k, json.dumps(v, sort_keys=True)) for k, v in sorted(report.items())]
        buf.write(",".join(csv_header) + "\n")
        for row in csv_rows:
            buf.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")
        text = buf.getvalue()
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dist_rows(dist):
    header = ["edge_lo", "edge_hi", "mass", "stderr"]
    rows = [
        (float(dist.edges[i]), float(dist.edges[i + 1]),
         float(dist.masses[i]), float(dist.stderr[i]))
        for i in range(dist.bins)
    ]
    return rows, header


# ---------------------------------------------------------------------------
# subcommands


def _cmd_check_class_a(args):
    measure = _load_measure(args.measure)
    k_max = max(1, int(round(-np.log2(args.delta_min))))
    report_obj = defect_sequence(measure, k_max=k_max, tol=args.tol)
    report = {
        "command": "check-class-a",
        "config": {"measure": args.measure, "delta_min": args.delta_min, "tol": args.tol},
        "deltas": [float(d) for d in report_obj.deltas],
        "defects": [float(d) for d in report_obj.defects],
        "verdict": report_obj.verdict,
    }
    rows = list(zip(report["deltas"], report["defects"]))
    _emit(args, report, rows, ["delta", "defect"])
    return 0 if report_obj.verdict == "in" else 1


def _cmd_check_conditions(args):
    t, g = read_density_csv(args.density)
    ll = condition_integral("loglogplus", (t, g), tol=args.tol)
    lm = condition_integral("logminus", (t, g), tol=args.tol)
    report = {
        "command": "check-conditions",
        "config": {"density": args.density, "tol": args.tol},
        "loglogplus": {"value": float(ll.value), "divergent": bool(ll.divergent)},
        "logminus": {"value": float(lm.value), "divergent": bool(lm.divergent)},
        "szego": not lm.divergent,
    }
    _emit(args, report)
    return 0 if not lm.divergent else 1


def _cmd_build_domain(args):
    if not args.output:
        raise ValueError("build-domain requires -o <domain.csv>")
    measure = _load_measure(args.measure, segment=(0.0, TWO_PI))
    domain = build_domain(measure, samples=args.samples, force=args.force,
                          refine_tol=args.tol)
    write_domain_csv(args.output, domain)
    report = {
        "command": "build-domain",
        "config": {"measure": args.measure, "samples": args.samples,
                   "tol": args.tol, "force": args.force},
        "output": args.output,
        "samples": int(domain.samples),
        "r_min": float(np.min(domain.r)),
        "r_max": float(np.max(domain.r)),
    }
    # -o names the domain CSV here, so the report itself goes to stdout
    _emit(argparse.Namespace(**{**vars(args), "output": None}), report)
    return 0


def _cmd_project(args):
    domain = read_domain_csv(args.domain)
    cfg = _walk_config(args)
    dist = wos_project(domain, 0.0, cfg)
    report = {
        "command": "project",
        "config": {"domain": args.domain, "walks": cfg.walks, "eps": cfg.eps,
                   "seed": cfg.seed, "bins": cfg.bins, "workers": cfg.workers},
    }
    report.update(dist.to_dict())
    rows, header = _dist_rows(dist)
    _emit(args, report, rows, header)
    return 0


def _cmd_roundtrip(args):
    measure = _load_measure(args.measure, segment=(0.0, TWO_PI))
    domain = build_domain(measure, samples=args.samples)
    cfg = _walk_config(args)
    dist = wos_project(domain, 0.0, cfg)
    ks = ks_distance(dist, measure)
    passed = ks <= args.tol
    report = {
        "command": "roundtrip",
        "config": {"measure": args.measure, "samples": args.samples,
                   "walks": cfg.walks, "eps": cfg.eps, "seed": cfg.seed,
                   "bins": cfg.bins, "workers": cfg.workers, "tol": args.tol},
        "ks": float(ks),
        "cap_hits": int(dist.cap_hits),
        "domain_samples": int(domain.samples),
        "verdict": "pass" if passed else "fail",
    }
    report["distribution"] = dist.to_dict()
    rows, header = _dist_rows(dist)
    _emit(args, report, rows, header)
    return 0 if passed else 1


def _cmd_bound_constant(args):
    from .harmonic_measure import bound_constant

    domain = read_domain_csv(args.domain)
    measure = _load_measure(args.measure, segment=(0.0, TWO_PI))
    cfg = _walk_config(args)
    center = complex(args.center[0], args.center[1])
    rep = bound_constant(domain, center, args.radius, measure, cfg)
    report = {
        "command": "bound-constant",
        "config": {"domain": args.domain, "measure": args.measure,
                   "center": [args.center[0], args.center[1]], "radius": args.radius,
                   "walks": cfg.walks, "eps": cfg.eps, "seed": cfg.seed,
                   "bins": cfg.bins, "workers": cfg.workers},
    }
    report.update(rep.to_dict())
    rows = list(enumerate(report["per_point"]))
    _emit(args, report, rows, ["point_index", "ratio"])
    return 0


def _cmd_theorem1(args):
    measure = _load_measure(args.measure, segment=(0.0, TWO_PI))
    u = _load_function(args.function)
    grid = np.geomspace(args.t_min, args.t_max, args.samples)
    rep = theorem1_profile(u, measure, grid, A=args.dilation)
    report = {
        "command": "theorem1",
        "config": {"measure": args.measure, "function": args.function,
                   "A": args.dilation, "t_min": args.t_min, "t_max": args.t_max,
                   "samples": args.samples},
        "verdicts": {"finite": bool(not rep.unbounded)},
    }
    report.update(rep.to_dict())
    rows = list(zip(report["grid"], report["L"], report["V"], report["S"]))
    _emit(args, report, rows, ["t", "L", "V", "S"])
    return 0 if not rep.unbounded else 1


def _cmd_phragmen(args):
    measure = _load_measure(args.measure, segment=(0.0, np.pi))
    u = _load_function(args.function)
    grid = np.geomspace(args.t_min, args.t_max, args.samples)
    rep = phragmen_check(u, measure, grid, tol=args.tol)
    report = {
        "command": "phragmen",
        "config": {"measure": args.measure, "function": args.function,
                   "t_min": args.t_min, "t_max": args.t_max,
                   "samples": args.samples, "tol": args.tol},
    }
    report.update(rep.to_dict())
    rows = list(zip([float(t) for t in grid], report["tail_ratio"]))
    _emit(args, report, rows, ["t", "tail_ratio"])
    return 0 if not rep.violation else 1


def _cmd_levinson(args):
    measure = _load_measure(args.measure, segment=(-1.0, 1.0))
    u = _load_function(args.function)
    grid = np.linspace(-0.9, 0.9, args.samples)
    rep = levinson_profile(u, measure, grid)
    report = {
        "command": "levinson",
        "config": {"measure": args.measure, "function": args.function,
                   "samples": args.samples},
    }
    report.update(rep.to_dict())
    rows = list(zip(report["grid"], report["V"]))
    _emit(args, report, rows, ["x", "V"])
    return 0


def _cmd_matsaev(args):
    w = MatsaevWeight(phi=_PHI_CHOICES[args.phi], tau=args.tau, name=args.phi)
    u = TestFunction("log-abs-entire", name="cli-zeros", zeros=tuple(args.zeros))
    grid = np.geomspace(args.r_min, args.r_max, args.samples)
    rep = matsaev_profile(u, w, grid)
    theta = np.linspace(0.0, np.pi, 9)
    report = {
        "command": "matsaev",
        "config": {"phi": args.phi, "tau": args.tau, "zeros": list(args.zeros),
                   "r_min": args.r_min, "r_max": args.r_max, "samples": args.samples},
        "f_samples": [float(v) for v in np.atleast_1d(matsaev_weight(w, theta))],
        "psi_samples": [float(v) for v in np.atleast_1d(psi_weight(w, theta))],
    }
    report.update(rep.to_dict())
    rows = list(zip(report["grid"], report["upper"], report["lower"], report["V"]))
    _emit(args, report, rows, ["r", "upper", "lower", "V"])
    return 0 if not rep.unbounded else 1


def _cmd_carleman(args):
    u = _load_function(args.function)
    sector = SectorSpec(r=args.sector[0], R=args.sector[1], a=args.sector[2])
    residual = carleman_identity_residual(u, sector, quad_n=args.quad_n)
    passed = residual <= args.tol
    report = {
        "command": "carleman-identity",
        "config": {"function": args.function, "sector": list(args.sector),
                   "quad_n": args.quad_n, "tol": args.tol},
        "residual": float(residual),
        "verdict": "pass" if passed else "fail",
    }
    _emit(args, report)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# parser


def _add_output_flags(p):
    p.add_argument("-o", "--output", default=None, help="write the report here")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_walk_flags(p):
    p.add_argument("--walks", type=int, default=100_000)
    p.add_argument("--eps", type=float, default=1.0e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starproj",
        description="Star-shaped domains from segment measures, with the "
                    "Monte Carlo round trip and the growth-theorem harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-class-a", help="defect-sequence membership test")
    p.add_argument("measure", help="measure CSV path or built-in name")
    p.add_argument("--delta-min", type=float, default=2.0 ** -14)
    p.add_argument("--tol", type=float, default=1.0e-2)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_check_class_a)

    p = sub.add_parser("check-conditions", help="log-log-plus and log-minus integrals")
    p.add_argument("density", help="density CSV path")
    p.add_argument("--tol", type=float, default=1.0e-9)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_check_conditions)

    p = sub.add_parser("build-domain", help="construct the star-shaped domain")
    p.add_argument("measure")
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1.0e-6, help="refinement tolerance")
    p.add_argument("--force", action="store_true",
                   help="build even when the membership verdict is not 'in'")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_build_domain)

    p = sub.add_parser("project", help="walk-on-spheres projection from 0")
    p.add_argument("domain", help="domain CSV path")
    _add_walk_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("roundtrip", help="build + project + KS report")
    p.add_argument("measure")
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--tol", type=float, default=0.02, help="KS pass threshold")
    _add_walk_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser("bound-constant", help="empirical domination constant")
    p.add_argument("domain")
    p.add_argument("measure")
    p.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0),
                   metavar=("X", "Y"))
    p.add_argument("--radius", type=float, default=0.0)
    _add_walk_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_bound_constant)

    p = sub.add_parser("theorem1", help="angular-integral growth profile")
    p.add_argument("measure")
    p.add_argument("--function", default="re-z")
    p.add_argument("-A", "--dilation", type=float, default=1.0)
    p.add_argument("--t-min", type=float, default=0.25)
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--samples", type=int, default=16)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_theorem1)

    p = sub.add_parser("phragmen", help="half-plane hypothesis/conclusion check")
    p.add_argument("measure", help="measure on [0, pi] (built-ins are rescaled)")
    p.add_argument("--function", default="half-plane-mobius")
    p.add_argument("--t-min", type=float, default=0.5)
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--tol", type=float, default=1.0e-3)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_phragmen)

    p = sub.add_parser("levinson", help="vertical-line profile on the square")
    p.add_argument("measure", help="measure on [-1, 1] (built-ins are rescaled)")
    p.add_argument("--function", default="square-pole")
    p.add_argument("--samples", type=int, default=13)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_levinson)

    p = sub.add_parser("matsaev", help="log-log weight profile")
    p.add_argument("--phi", choices=sorted(_PHI_CHOICES), default="one")
    p.add_argument("--tau", type=float, default=0.2)
    p.add_argument("--zeros", type=float, nargs="+", default=(1.0, -2.0, 3.5))
    p.add_argument("--r-min", type=float, default=0.9)
    p.add_argument("--r-max", type=float, default=8.0)
    p.add_argument("--samples", type=int, default=10)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_matsaev)

    p = sub.add_parser("carleman-identity", help="four-term sector identity residual")
    p.add_argument("--function", default="im-z")
    p.add_argument("--sector", type=float, nargs=3, default=(0.5, 2.0, 0.1),
                   metavar=("r", "R", "a"))
    p.add_argument("--quad-n", type=int, default=512)
    p.add_argument("--tol", type=float, default=1.0e-6)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_carleman)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ClassMembershipError as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        return 1
    except (InvalidMeasureError, GeometryError, UnsupportedFunctionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
