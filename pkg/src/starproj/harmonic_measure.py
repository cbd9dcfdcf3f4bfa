"""Harmonic measure estimation: walk-on-spheres projection, the exact disk
formula, the harmonic-measure-vs-measure bound constant, and the KS metric.

The walk-on-spheres engine is the independent oracle for the round-trip
validation: it knows nothing about potentials, only about distances to the
boundary polyline.  Runs are deterministic for a fixed (seed, walk count)
regardless of the worker count, because every walk draws from its own
counter-based stream keyed by (master seed, walk index) and aggregation sums
integer bin counts chunk by chunk in a fixed order.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .construction import GeometryError, StarShapedDomain, domain_distance
from .measures import InvalidMeasureError, SegmentMeasure, _freeze

__all__ = [
    "WalkConfig",
    "AngularDistribution",
    "BoundConstantReport",
    "wos_project",
    "disk_harmonic_measure",
    "bound_constant",
    "ks_distance",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class WalkConfig:
    """Monte Carlo parameters.

    eps is the absorption shell as a fraction of the largest boundary radius.
    max_steps caps runaway walks; hits are counted and reported, never
    silently absorbed.
    """

    walks: int = 100_000
    eps: float = 1.0e-4
    seed: int = 0
    workers: int = 1
    bins: int = 64
    max_steps: int = 16384
    chunk_size: int = 16384

    def __post_init__(self):
        if self.walks < 1:
            raise ValueError("walks must be at least 1")
        if not (self.eps > 0.0):
            raise ValueError("eps must be positive")
        if self.bins < 8:
            raise ValueError("bins must be at least 8")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.max_steps < 1 or self.chunk_size < 1:
            raise ValueError("max_steps and chunk_size must be positive")


@dataclass(frozen=True)
class AngularDistribution:
    """Binned empirical angular distribution over [0, 2pi]."""

    edges: np.ndarray
    masses: np.ndarray
    stderr: np.ndarray
    walks: int
    seed: int
    cap_hits: int = 0

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        stderr = np.asarray(self.stderr, dtype=float)
        if edges.size < 9 or edges.size != masses.size + 1 or masses.shape != stderr.shape:
            raise ValueError("need >= 8 bins with matching edges/masses/stderr")
        if (masses < 0).any() or (stderr < 0).any():
            raise ValueError("masses and standard errors must be nonnegative")
        if abs(float(np.sum(masses)) - 1.0) > 1.0e-12:
            raise ValueError("bin masses must sum to 1")
        object.__setattr__(self, "edges", _freeze(edges))
        object.__setattr__(self, "masses", _freeze(masses))
        object.__setattr__(self, "stderr", _freeze(stderr))

    @property
    def bins(self) -> int:
        return self.masses.size

    @property
    def cdf(self) -> np.ndarray:
        """Empirical CDF sampled at the bin edges (leading 0 included)."""
        out = np.empty(self.edges.size)
        out[0] = 0.0
        np.cumsum(self.masses, out=out[1:])
        return out

    def to_dict(self) -> dict:
        return {
            "bins": int(self.bins),
            "cap_hits": int(self.cap_hits),
            "edges": [float(v) for v in self.edges],
            "masses": [float(v) for v in self.masses],
            "seed": int(self.seed),
            "stderr": [float(v) for v in self.stderr],
            "walks": int(self.walks),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# chunk worker state, installed once per process (inherited through fork when
# a pool is used)
_WORK = {}


def _init_worker(index, z, eps_abs, seed, max_steps, bins):
    _WORK["args"] = (index, complex(z), float(eps_abs), int(seed), int(max_steps), int(bins))


def _chunk_task(span):
    start, count = span
    return _simulate_chunk(*_WORK["args"], start, count)


_ROUND = 256  # uniform draws generated per walk per round


def _round_draws(seed, walk_ids, rnd):
    """Draws [rnd*_ROUND, (rnd+1)*_ROUND) of each walk's private stream.

    Each walk owns the Philox stream keyed by (seed, walk id), so later
    rounds are recovered by replaying the stream; only the few walks that
    survive a round ever pay for the replay.
    """
    out = np.empty((walk_ids.size, _ROUND))
    key = np.empty(2, dtype=np.uint64)
    key[0] = np.uint64(seed)
    need = (rnd + 1) * _ROUND
    for i, w in enumerate(walk_ids):
        key[1] = np.uint64(w)
        gen = np.random.Generator(np.random.Philox(key=key.copy()))
        out[i] = gen.random(need)[need - _ROUND :]
    return out


def _simulate_chunk(index, z, eps_abs, seed, max_steps, bins, start, count):
    """Run one contiguous block of walks; returns (bin counts, cap hits)."""
    pos = np.full(count, z, dtype=complex)
    walk = np.arange(start, start + count, dtype=np.int64)
    counts = np.zeros(bins, dtype=np.int64)
    rnd = 0
    u = _round_draws(seed, walk, 0)
    for s in range(max_steps):
        if walk.size == 0:
            break
        if s >= (rnd + 1) * _ROUND:
            rnd += 1
            u = _round_draws(seed, walk, rnd)
        step = index.step_bound(pos.real, pos.imag)
        cand = np.flatnonzero(step < eps_abs)
        if cand.size:
            # the step radius is only a lower bound; resolve the true
            # distance before deciding absorption
            true_d, t_seg, t_foot = index.resolve_distance(pos.real[cand], pos.imag[cand])
            absorbed = true_d < eps_abs
            if np.any(absorbed):
                ang = index.foot_angle(t_seg[absorbed], t_foot[absorbed])
                b = np.minimum((ang * (bins / TWO_PI)).astype(np.int64), bins - 1)
                counts += np.bincount(b, minlength=bins)
            step[cand] = np.where(absorbed, 0.0, true_d)
            pos = pos + step * np.exp(TWO_PI * 1j * u[:, s - rnd * _ROUND])
            keep = np.ones(walk.size, dtype=bool)
            keep[cand[absorbed]] = False
            pos = pos[keep]
            walk = walk[keep]
            u = u[keep]
        else:
            pos = pos + step * np.exp(TWO_PI * 1j * u[:, s - rnd * _ROUND])
    return counts, int(walk.size)


def wos_project(domain: StarShapedDomain, z, cfg: WalkConfig) -> AngularDistribution:
    """Estimate the radial projection of harmonic measure at z by
    walk-on-spheres: jump to a uniform point of the largest certified inner
    circle until within eps of the boundary, then record the angle of the
    nearest boundary point.
    """
    z = complex(z)
    eps_abs = cfg.eps * domain.max_radius
    if domain_distance(domain, z) <= eps_abs:
        raise GeometryError("start point must lie inside the domain, clear of the eps shell")
    index = domain._index
    spans = [
        (s, min(cfg.chunk_size, cfg.walks - s))
        for s in range(0, cfg.walks, cfg.chunk_size)
    ]
    if cfg.workers == 1 or len(spans) == 1:
        _init_worker(index, z, eps_abs, cfg.seed, cfg.max_steps, cfg.bins)
        results = [_chunk_task(sp) for sp in spans]
    else:
        with multiprocessing.Pool(
            processes=cfg.workers,
            initializer=_init_worker,
            initargs=(index, z, eps_abs, cfg.seed, cfg.max_steps, cfg.bins),
        ) as pool:
            results = pool.map(_chunk_task, spans)
    counts = np.zeros(cfg.bins, dtype=np.int64)
    caps = 0
    for c, k in results:
        counts += c
        caps += k
    absorbed = cfg.walks - caps
    if absorbed == 0:
        raise GeometryError("no walk reached the boundary within the step cap")
    masses = counts / absorbed
    stderr = np.sqrt(masses * (1.0 - masses) / absorbed)
    edges = np.linspace(0.0, TWO_PI, cfg.bins + 1)
    return AngularDistribution(
        edges=edges, masses=masses, stderr=stderr,
        walks=cfg.walks, seed=cfg.seed, cap_hits=caps,
    )


def disk_harmonic_measure(z, arc) -> float:
    """Harmonic measure of the boundary arc seen from z in the unit disk.

    Closed form: the Poisson kernel has the continuous antiderivative
    A(t) = (t - phi) + 2 atan(rho sin(t - phi) / (1 - rho cos(t - phi)))
    for z = rho e^{i phi}; since 1 - rho cos > 0 for rho < 1 the arctangent
    never crosses a branch cut and no correction across t = phi is needed.
    """
    z = complex(z)
    rho = abs(z)
    if rho >= 1.0:
        raise GeometryError("z must lie strictly inside the unit disk")
    alpha, beta = float(arc[0]), float(arc[1])
    if not beta > alpha:
        raise ValueError("arc must satisfy alpha < beta")
    if beta - alpha > TWO_PI * (1.0 + 1.0e-15):
        raise ValueError("arc may not wrap more than the full circle")
    if beta - alpha >= TWO_PI * (1.0 - 1.0e-15):
        return 1.0
    phi = np.angle(z)

    def anti(t):
        d = t - phi
        return d + 2.0 * np.arctan2(rho * np.sin(d), 1.0 - rho * np.cos(d))

    return float((anti(beta) - anti(alpha)) / TWO_PI)


@dataclass(frozen=True)
class BoundConstantReport:
    """Empirical constant for the harmonic-measure domination bound."""

    constant: float
    stderr: float
    point: complex
    bin: int
    per_point: tuple
    excluded_bins: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "constant": float(self.constant),
            "stderr": float(self.stderr),
            "point": [float(self.point.real), float(self.point.imag)],
            "bin": int(self.bin),
            "per_point": [float(v) for v in self.per_point],
            "excluded_bins": [int(v) for v in self.excluded_bins],
        }


def bound_constant(domain: StarShapedDomain, center, radius, nu: SegmentMeasure,
                   cfg: WalkConfig, *, boundary_points: int = 8,
                   mass_floor: float = 1.0e-3) -> BoundConstantReport:
    """Estimate sup over z on the circle |z - center| = radius and bins E of
    omega(z, E) / nu(E).

    Bins whose nu-mass falls below mass_floor are excluded from the ratio and
    reported.  Each sample point runs its own projection with seed + point
    index, so the report is deterministic.
    """
    center = complex(center)
    radius = float(radius)
    if radius < 0:
        raise GeometryError("radius must be nonnegative")
    eps_abs = cfg.eps * domain.max_radius
    clearance = domain_distance(domain, center)
    if clearance <= radius + eps_abs:
        raise GeometryError("disk K must lie inside the domain with positive clearance")
    if radius == 0.0:
        points = [center]
    else:
        angles = TWO_PI * np.arange(boundary_points) / boundary_points
        points = [center + radius * np.exp(1j * a) for a in angles]
    edges = np.linspace(0.0, TWO_PI, cfg.bins + 1)
    nu_mass = np.diff(nu(edges))
    usable = nu_mass >= mass_floor
    excluded = tuple(int(j) for j in np.flatnonzero(~usable))
    best = -np.inf
    best_se = 0.0
    best_point = points[0]
    best_bin = 0
    per_point = []
    for j, zj in enumerate(points):
        sub = WalkConfig(
            walks=cfg.walks, eps=cfg.eps, seed=cfg.seed + j, workers=cfg.workers,
            bins=cfg.bins, max_steps=cfg.max_steps, chunk_size=cfg.chunk_size,
        )
        dist = wos_project(domain, zj, sub)
        ratios = np.where(usable, dist.masses / np.where(usable, nu_mass, 1.0), -np.inf)
        k = int(np.argmax(ratios))
        per_point.append(float(ratios[k]))
        if ratios[k] > best:
            best = float(ratios[k])
            best_se = float(dist.stderr[k] / nu_mass[k])
            best_point = zj
            best_bin = k
    return BoundConstantReport(
        constant=best, stderr=best_se, point=best_point, bin=best_bin,
        per_point=tuple(per_point), excluded_bins=excluded,
    )


def ks_distance(dist: AngularDistribution, nu: SegmentMeasure) -> float:
    """Kolmogorov-Smirnov distance between the binned empirical distribution
    and nu, taken as the sup over bin edges."""
    a, b = nu.segment
    if abs(a - dist.edges[0]) > 1.0e-9 or abs(b - dist.edges[-1]) > 1.0e-9:
        raise InvalidMeasureError("measure segment does not match the distribution edges")
    return float(np.max(np.abs(dist.cdf - nu(dist.edges))))
