"""Forward construction of star-shaped domains from segment measures.

Given a distribution nu on [0, 2pi] whose inverse profile has a continuous
circle potential u, the domain bounded by r(theta) = exp(-u) at the angle
the boundary correspondence assigns to theta has harmonic measure at 0 whose
radial projection is nu.  This module builds that domain as a polyline,
exposes the boundary correspondence in closed form, and provides the signed
distance queries the walk-on-spheres engine needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .measures import (
    InvalidMeasureError,
    SegmentMeasure,
    _freeze,
    _read_two_column,
    defect_sequence,
    inverse_distribution,
)
from .potentials import TWO_PI, _boundary_values

__all__ = [
    "StarShapedDomain",
    "GeometryError",
    "ClassMembershipError",
    "build_domain",
    "boundary_correspondence",
    "domain_distance",
    "read_domain_csv",
    "write_domain_csv",
]


class GeometryError(ValueError):
    """Domain geometry precondition violated."""


class ClassMembershipError(ValueError):
    """Measure failed the class membership check required by a construction."""


def _segment_distances(px, py, ax, ay, wx, wy, ww):
    """Exact point-to-segment distances, broadcast over trailing axes.

    Returns (distance^2, foot parameter clipped to [0, 1]).
    """
    dx = px - ax
    dy = py - ay
    t = np.clip((dx * wx + dy * wy) / ww, 0.0, 1.0)
    fx = dx - t * wx
    fy = dy - t * wy
    return fx * fx + fy * fy, t


class _BoundaryIndex:
    """Distance index over the boundary polyline.

    Step queries return a certified lower bound of the true boundary
    distance: nearest vertex from a k-d tree minus half the longest chord
    (the nearest boundary point sits within half a chord of some vertex).
    Lower bounds are all a walk-on-spheres step needs; the exact nearest
    segment is only resolved near absorption, through a vertex-ball search.
    An angular-bucket table backs the public signed-distance query.
    """

    def __init__(self, theta, r):
        v = r * np.exp(1j * theta)
        v[-1] = v[0]  # close the polyline exactly
        self.ax = np.ascontiguousarray(v.real[:-1])
        self.ay = np.ascontiguousarray(v.imag[:-1])
        self.bx = np.ascontiguousarray(v.real[1:])
        self.by = np.ascontiguousarray(v.imag[1:])
        self.wx = self.bx - self.ax
        self.wy = self.by - self.ay
        ww = self.wx**2 + self.wy**2
        self.ww = np.where(ww > 0.0, ww, 1.0)
        self.theta = theta
        self.n_seg = self.ax.size
        self.h_half = 0.5 * float(np.sqrt(ww.max()))
        self.tree = cKDTree(np.column_stack([self.ax, self.ay]))

        # radial band per segment: outer from the vertices, inner exact
        d20, _ = _segment_distances(0.0, 0.0, self.ax, self.ay, self.wx, self.wy, self.ww)
        self.seg_rmin = np.sqrt(d20)
        self.seg_rmax = np.maximum(np.hypot(self.ax, self.ay), np.hypot(self.bx, self.by))

        nb = int(min(256, max(8, self.n_seg // 16)))
        self.nb = nb
        edges = np.linspace(0.0, TWO_PI, nb + 1)
        # segments are consecutive in angle, so a bucket covers a contiguous
        # index range [lo_q, hi_q)
        self.lo = np.maximum(np.searchsorted(theta, edges[:-1], side="right") - 1, 0)
        self.hi = np.minimum(np.searchsorted(theta, edges[1:], side="left"), self.n_seg)
        self.bucket_rmin = np.empty(nb)
        self.bucket_rmax = np.empty(nb)
        self.bucket_tlo = np.empty(nb)
        self.bucket_thi = np.empty(nb)
        for q in range(nb):
            lo, hi = self.lo[q], max(self.hi[q], self.lo[q] + 1)
            self.bucket_rmin[q] = self.seg_rmin[lo:hi].min()
            self.bucket_rmax[q] = self.seg_rmax[lo:hi].max()
            self.bucket_tlo[q] = theta[lo]
            self.bucket_thi[q] = theta[hi]
        # fixed-width slice covering each bucket plus one neighbor each side
        prev_lo = self.lo[(np.arange(nb) - 1) % nb]
        next_hi = self.hi[(np.arange(nb) + 1) % nb]
        spans = (next_hi - prev_lo) % self.n_seg
        spans[spans == 0] = self.n_seg
        self.slice_start = prev_lo
        self.slice_len = int(spans.max())
        self._build_far_table()

    def _build_far_table(self):
        """Tabulated lower bound on the distance to all non-slice segments,
        per (query bucket, radial cell).

        The distance to a fixed far set is 1-Lipschitz in the query point, so
        evaluating at the cell-center radius and subtracting half the cell
        height (and likewise folding the angular half-widths into the bucket
        gap) keeps the table conservative.
        """
        nb = self.nb
        n_rad = 128
        self.n_rad = n_rad
        self.rad_hi = float(self.seg_rmax.max())
        rho_m = (np.arange(n_rad) + 0.5) * (self.rad_hi / n_rad)
        half_cell = 0.5 * self.rad_hi / n_rad
        width = TWO_PI / nb
        centers_q = (np.arange(nb) + 0.5) * width
        centers_b = 0.5 * (self.bucket_tlo + self.bucket_thi)
        halfw_b = 0.5 * (self.bucket_thi - self.bucket_tlo)
        self.far_table = np.empty((nb, n_rad))
        cols = np.arange(nb)
        for q in range(nb):
            far = (cols - q) % nb
            far = (far > 1) & (far < nb - 1)
            dc = np.abs(_reduce(centers_b[far] - centers_q[q]))
            gap = np.maximum(dc - halfw_b[far] - 0.5 * width, 0.0)
            rmin = self.bucket_rmin[far][None, :]
            rmax = self.bucket_rmax[far][None, :]
            cg = np.cos(gap)[None, :]
            s = np.clip(rho_m[:, None] * cg, rmin, rmax)
            d2 = rho_m[:, None] ** 2 + s * s - 2.0 * rho_m[:, None] * s * cg
            touched = gap[None, :] == 0.0
            radial = np.maximum(np.maximum(rmin - rho_m[:, None], rho_m[:, None] - rmax), 0.0)
            d = np.where(touched, radial, np.sqrt(np.maximum(d2, 0.0)))
            self.far_table[q] = np.maximum(d.min(axis=1) - half_cell, 0.0)

    def far_bound(self, rho, gamma):
        """Table lookup: certified lower bound on the distance to every
        segment outside the 3-bucket slice."""
        q = self._bucket_of(gamma)
        cell = np.minimum((rho * (self.n_rad / self.rad_hi)).astype(np.intp), self.n_rad - 1)
        return self.far_table[q, cell]

    def step_bound(self, px, py):
        """Certified lower bound on the boundary distance, one batched
        tree query: nearest-vertex distance minus half the longest chord."""
        dv, _ = self.tree.query(np.column_stack([px, py]))
        return np.maximum(dv - self.h_half, 0.0)

    def _exact_over(self, px, py, cand):
        """Exact minimum over per-point candidate segment lists (2-d cand)."""
        d2, t = _segment_distances(
            px[:, None], py[:, None],
            self.ax[cand], self.ay[cand], self.wx[cand], self.wy[cand], self.ww[cand],
        )
        best = np.argmin(d2, axis=1)
        rows = np.arange(px.size)
        return np.sqrt(d2[rows, best]), cand[rows, best], t[rows, best]

    def resolve_distance(self, px, py):
        """Exact (distance, segment, foot) via a k-nearest-vertex search.

        The nearest boundary point lies within half a chord of one of its
        segment's endpoints, so any vertex set covering the ball of radius
        d + h_half is complete; the k-th query distance certifies coverage,
        with a ball query as fallback for the rare failures.
        """
        k = min(8, self.n_seg)
        dvk, vid = self.tree.query(np.column_stack([px, py]), k=k)
        dvk = np.atleast_2d(dvk)
        vid = np.atleast_2d(vid)
        cand = np.concatenate([vid, (vid - 1) % self.n_seg], axis=1)
        dist, seg, foot = self._exact_over(px, py, cand)
        if k < self.n_seg:
            short = np.flatnonzero(dvk[:, -1] < dist + self.h_half + 1e-12)
            for i in short:
                vids = self.tree.query_ball_point(
                    (px[i], py[i]), dist[i] + self.h_half + 1e-12
                )
                v = np.asarray(vids, dtype=np.intp)
                ci = np.unique(np.concatenate([v, (v - 1) % self.n_seg]))
                d2, t = _segment_distances(px[i], py[i], self.ax[ci], self.ay[ci],
                                           self.wx[ci], self.wy[ci], self.ww[ci])
                j = int(np.argmin(d2))
                dist[i], seg[i], foot[i] = np.sqrt(d2[j]), ci[j], t[j]
        return dist, seg, foot

    def _bucket_of(self, gamma):
        return np.minimum((gamma * (self.nb / TWO_PI)).astype(np.intp), self.nb - 1)

    def slice_distance(self, px, py, gamma):
        """Exact distances over the 3-bucket slice around each point.

        Returns (distance, segment index, foot parameter), all per point.
        """
        q = self._bucket_of(gamma)
        idx = (self.slice_start[q][:, None] + np.arange(self.slice_len)[None, :]) % self.n_seg
        d2, t = _segment_distances(
            px[:, None], py[:, None],
            self.ax[idx], self.ay[idx], self.wx[idx], self.wy[idx], self.ww[idx],
        )
        best = np.argmin(d2, axis=1)
        rows = np.arange(px.size)
        return np.sqrt(d2[rows, best]), idx[rows, best], t[rows, best]

    def other_bucket_bound(self, rho, gamma):
        """Lower bound on the distance to every segment outside the slice."""
        q = self._bucket_of(gamma)
        inside = (gamma[:, None] >= self.bucket_tlo[None, :]) & (
            gamma[:, None] <= self.bucket_thi[None, :]
        )
        d_lo = np.abs(_reduce(self.bucket_tlo[None, :] - gamma[:, None]))
        d_hi = np.abs(_reduce(self.bucket_thi[None, :] - gamma[:, None]))
        dphi = np.where(inside, 0.0, np.minimum(d_lo, d_hi))
        s = np.clip(rho[:, None] * np.cos(dphi), self.bucket_rmin[None, :], self.bucket_rmax[None, :])
        lb2 = rho[:, None] ** 2 + s * s - 2.0 * rho[:, None] * s * np.cos(dphi)
        radial = np.maximum.reduce(
            [self.bucket_rmin[None, :] - rho[:, None], rho[:, None] - self.bucket_rmax[None, :],
             np.zeros_like(lb2)]
        )
        lb = np.where(inside, radial, np.sqrt(np.maximum(lb2, 0.0)))
        qn = q[:, None]
        neighbor = (np.arange(self.nb)[None, :] - qn) % self.nb
        lb[(neighbor <= 1) | (neighbor == self.nb - 1)] = np.inf
        return lb.min(axis=1)

    def full_distance(self, px, py):
        """Exact distance over all segments; returns (distance, seg, foot)."""
        d2, t = _segment_distances(
            px[:, None], py[:, None],
            self.ax[None, :], self.ay[None, :], self.wx[None, :], self.wy[None, :],
            self.ww[None, :],
        )
        best = np.argmin(d2, axis=1)
        rows = np.arange(px.size)
        return np.sqrt(d2[rows, best]), best, t[rows, best]

    def foot_angle(self, seg, t):
        fx = self.ax[seg] + t * self.wx[seg]
        fy = self.ay[seg] + t * self.wy[seg]
        return np.mod(np.arctan2(fy, fx), TWO_PI)

    def boundary_radius(self, gamma):
        """Radius of the polyline along the ray at angle gamma (ray-chord cut)."""
        gamma = np.asarray(gamma, dtype=float)
        seg = np.clip(np.searchsorted(self.theta, gamma, side="right") - 1, 0, self.n_seg - 1)
        ux, uy = np.cos(gamma), np.sin(gamma)
        denom = self.wx[seg] * uy - self.wy[seg] * ux
        cross_au = self.ax[seg] * uy - self.ay[seg] * ux
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(np.abs(denom) > 0.0, -cross_au / denom, 0.0)
        t = np.clip(t, 0.0, 1.0)
        return (self.ax[seg] + t * self.wx[seg]) * ux + (self.ay[seg] + t * self.wy[seg]) * uy


def _reduce(x):
    return x - TWO_PI * np.round(x / TWO_PI)


@dataclass(eq=False)
class StarShapedDomain:
    """Strictly star-shaped domain about 0, boundary sampled as (theta_j, r_j).

    theta runs from 0 to 2pi inclusive and strictly increases; all radii are
    positive and r[0] == r[-1] exactly.  The boundary between samples is the
    straight chord, so the domain is the polygon with vertices r_j e^{i theta_j}.
    """

    theta: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if theta.ndim != 1 or theta.shape != r.shape or theta.size < 4:
            raise GeometryError("domain needs matching 1-d theta and r with >= 4 samples")
        if not (np.isfinite(theta).all() and np.isfinite(r).all()):
            raise GeometryError("domain samples must be finite")
        if abs(theta[0]) > 1e-12 or abs(theta[-1] - TWO_PI) > 1e-9:
            raise GeometryError("theta must run from 0 to 2*pi")
        if not (np.diff(theta) > 0).all():
            raise GeometryError("theta must be strictly increasing")
        if not (r > 0).all():
            raise GeometryError("all radii must be positive")
        if r[0] != r[-1]:
            raise GeometryError("periodicity violated: r(0) != r(2*pi)")
        theta = theta.copy()
        theta[0] = 0.0
        theta[-1] = TWO_PI
        object.__setattr__(self, "theta", _freeze(theta))
        object.__setattr__(self, "r", _freeze(r))

    @property
    def samples(self) -> int:
        return self.theta.size - 1

    @property
    def max_radius(self) -> float:
        return float(np.max(self.r))

    @cached_property
    def _index(self) -> _BoundaryIndex:
        return _BoundaryIndex(self.theta, self.r.copy())

    def radius(self, gamma):
        """Polyline radius along the ray at angle gamma."""
        gamma = np.mod(np.asarray(gamma, dtype=float), TWO_PI)
        out = self._index.boundary_radius(np.atleast_1d(gamma))
        return float(out[0]) if gamma.ndim == 0 else out

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        gamma = np.mod(np.angle(z), TWO_PI)
        return np.abs(z) < self.radius(gamma)


def domain_distance(domain: StarShapedDomain, z) -> float:
    """Signed distance from z to the boundary: positive inside, negative out."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zs = np.atleast_1d(z).ravel()
    idx = domain._index
    gamma = np.mod(np.arctan2(zs.imag, zs.real), TWO_PI)
    rho = np.abs(zs)
    d, _, _ = idx.slice_distance(zs.real, zs.imag, gamma)
    # the slice minimum is exact unless a far segment could undercut it;
    # the far table is only tabulated up to the outer radius
    unsure = (idx.far_bound(rho, gamma) < d) | (rho >= idx.rad_hi * (1.0 - 1.0 / idx.n_rad))
    if unsure.any():
        d = d.copy()
        d[unsure] = idx.full_distance(zs.real[unsure], zs.imag[unsure])[0]
    inside = domain.contains(zs)
    out = np.where(inside, d, -d)
    # points exactly on the boundary carry distance zero, sign irrelevant
    out = np.where(d == 0.0, 0.0, out)
    if scalar:
        return float(out[0])
    return out.reshape(np.atleast_1d(z).shape)


def _require_circle_segment(nu: SegmentMeasure):
    a, b = nu.segment
    if abs(a) > 1e-9 or abs(b - TWO_PI) > 1e-9:
        raise InvalidMeasureError("measure must live on the segment [0, 2*pi]")


def boundary_correspondence(nu: SegmentMeasure, psi):
    """Image of e^{i psi} under the boundary extension of the conformal map.

    Returns (arg, radius) = (mu(psi/2pi), exp(-u(e^{i psi}))) for mu the
    inverse profile of nu; uniform measure in psi pushes forward to nu in arg.
    """
    _require_circle_segment(nu)
    prof = inverse_distribution(nu)
    psi = np.asarray(psi, dtype=float)
    scalar = psi.ndim == 0
    ps = np.mod(np.atleast_1d(psi).astype(float), TWO_PI)
    arg = prof(ps / TWO_PI)
    rad = np.exp(-_boundary_values(prof, ps))
    if scalar:
        return float(arg[0]), float(rad[0])
    return arg, rad


def build_domain(nu: SegmentMeasure, samples: int = 4096, *, force: bool = False,
                 refine_tol: float = 1e-6, max_doublings: int = 4) -> StarShapedDomain:
    """Construct the star-shaped domain whose harmonic measure at 0 radially
    projects to nu.

    r(theta_j) = exp(-u(e^{2 pi i nu(theta_j)})) on the uniform theta grid,
    with u the circle potential of nu's inverse profile.  The grid doubles
    (up to max_doublings) until the radius function is resolved: the largest
    gap between the fine grid and the chord interpolant of the coarse one
    falls below refine_tol.

    nu must test as a class member unless force is given.
    """
    _require_circle_segment(nu)
    if samples < 16:
        raise GeometryError("samples must be at least 16")
    if not force:
        report = defect_sequence(nu)
        if report.verdict != "in":
            raise ClassMembershipError(
                f"measure verdict is {report.verdict!r}; pass force=True to build anyway"
            )
    prof = inverse_distribution(nu)

    def radii(m):
        theta = np.linspace(0.0, TWO_PI, m + 1)
        psi = TWO_PI * nu(theta)
        r = np.exp(-_boundary_values(prof, psi))
        r[-1] = r[0]
        return theta, r

    m = int(samples)
    theta, r = radii(m)
    for _ in range(max_doublings):
        theta2, r2 = radii(2 * m)
        gap = np.max(np.abs(r2[1::2] - 0.5 * (r[:-1] + r[1:])))
        if gap < refine_tol:
            break
        m, theta, r = 2 * m, theta2, r2
    return StarShapedDomain(theta, r)


def write_domain_csv(path, domain: StarShapedDomain):
    import csv

    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["theta", "r"])
        for ti, ri in zip(domain.theta, domain.r):
            wr.writerow([repr(float(ti)), repr(float(ri))])


def read_domain_csv(path) -> StarShapedDomain:
    theta, r = _read_two_column(path, ["theta", "r"])
    try:
        return StarShapedDomain(theta, r)
    except GeometryError as exc:
        raise GeometryError(f"{path}: {exc}") from None
