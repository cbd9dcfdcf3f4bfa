"""Distribution functions on a segment and their regularity testers.

A measure is stored as a piecewise-linear, strictly increasing
distribution function nu on [a, b] with nu(a) = 0, nu(b) = 1.  Its
inverse mu (clamped to the endpoint values outside [0, 1]) is the
object the regularity condition speaks about:

    D(delta) = sup_x  int_0^delta (mu(x+t) - mu(x-t)) / t dt  -> 0.

Because mu is piecewise linear every integral in this module has a
closed form per segment; no quadrature error enters the testers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .quadrature import IntegralResult, endpoint_refined_integral


class InvalidMeasureError(ValueError):
    """Node data does not describe a strictly increasing distribution."""


class DegenerateMeasureError(ValueError):
    """A construction produced a measure with no mass to normalize."""


def _check_nodes(x, y, what):
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size or x.size < 2:
        raise InvalidMeasureError(f"{what}: need two 1-d node arrays of equal length >= 2")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise InvalidMeasureError(f"{what}: nodes contain NaN or Inf")
    if not (np.diff(x) > 0).all():
        raise InvalidMeasureError(f"{what}: abscissae must be strictly increasing")
    if not (np.diff(y) > 0).all():
        raise InvalidMeasureError(f"{what}: values must be strictly increasing")


def _freeze(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


@dataclass(eq=False)
class SegmentMeasure:
    """Piecewise-linear probability distribution function on [a, b]."""

    t: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        t, nu = np.asarray(self.t, float), np.asarray(self.nu, float)
        _check_nodes(t, nu, "measure")
        if abs(nu[0]) > 1e-9 or abs(nu[-1] - 1.0) > 1e-9:
            raise InvalidMeasureError("measure: nu must run from 0 to 1")
        nu = nu.copy()
        nu[0], nu[-1] = 0.0, 1.0
        self.t = _freeze(t)
        self.nu = _freeze(nu)

    @property
    def a(self) -> float:
        return float(self.t[0])

    @property
    def b(self) -> float:
        return float(self.t[-1])

    @property
    def segment(self) -> tuple:
        return (self.a, self.b)

    @cached_property
    def density(self) -> np.ndarray:
        """Slope of nu on each node interval."""
        return _freeze(np.diff(self.nu) / np.diff(self.t))

    def __call__(self, x):
        return np.interp(x, self.t, self.nu)

    @cached_property
    def _inverse(self) -> "InverseProfile":
        return InverseProfile(self.nu, self.t)

    def inverse(self) -> "InverseProfile":
        return self._inverse


@dataclass(eq=False)
class InverseProfile:
    """Inverse mu of a distribution, defined on [0, 1] and clamped outside."""

    s: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        s, v = np.asarray(self.s, float), np.asarray(self.values, float)
        _check_nodes(s, v, "inverse profile")
        if abs(s[0]) > 1e-9 or abs(s[-1] - 1.0) > 1e-9:
            raise InvalidMeasureError("inverse profile: arguments must run from 0 to 1")
        s = s.copy()
        s[0], s[-1] = 0.0, 1.0
        self.s = _freeze(s)
        self.values = _freeze(v)

    @property
    def a(self) -> float:
        return float(self.values[0])

    @property
    def b(self) -> float:
        return float(self.values[-1])

    @cached_property
    def slopes(self) -> np.ndarray:
        return _freeze(np.diff(self.values) / np.diff(self.s))

    @property
    def max_slope(self) -> float:
        return float(self.slopes.max())

    def __call__(self, x):
        # np.interp clamps to the endpoint values, which is exactly the
        # extension mu(x) = a for x < 0, mu(x) = b for x > 1
        return np.interp(x, self.s, self.values)

    def transpose(self) -> SegmentMeasure:
        return SegmentMeasure(self.values, self.s)


def inverse_distribution(measure: SegmentMeasure) -> InverseProfile:
    """Inverse of a strictly increasing piecewise-linear distribution.

    Errors on non-monotone input (via the node validation)."""
    return measure.inverse()


# ---------------------------------------------------------------------------
# defect of the averaged-increment condition


def _defect_at(prof: InverseProfile, x: float, delta: float) -> float:
    """Exact int_0^delta (mu(x+t) - mu(x-t))/t dt for piecewise-linear mu."""
    s = prof.s
    right = s[(s > x) & (s < x + delta)] - x
    left = x - s[(s > x - delta) & (s < x)]
    inner = np.unique(np.concatenate([right, left]))
    inner = inner[(inner > 0.0) & (inner < delta)]
    edges = np.concatenate([[0.0], inner, [delta]])
    r = prof(x + edges) - prof(x - edges)  # r[0] = 0 exactly
    dt = np.diff(edges)
    dr = np.diff(r)
    m = dr / dt
    # first interval: r = m t through the origin, integral is r(t_1)
    total = r[1]
    if edges.size > 2:
        c0 = r[1:-1] - m[1:] * edges[1:-1]
        total += float(np.sum(m[1:] * dt[1:] + c0 * np.log(edges[2:] / edges[1:-1])))
    return float(total)


def class_a_defect(measure: SegmentMeasure, delta: float, *, refine_tol: float = 0.01,
                   max_grid: int = 4097) -> float:
    """D(delta): sup over shifts x of the averaged increment integral.

    The sup is taken over the node grid of mu, the node grid shifted by
    +-delta, and a uniform grid on [-delta, 1+delta] that is doubled
    until the sup moves by less than `refine_tol` relatively.
    """
    if not (0.0 < delta <= 1.0):
        raise ValueError("delta must lie in (0, 1]")
    prof = measure.inverse()
    cand = np.concatenate([prof.s, prof.s - delta, prof.s + delta])
    cand = np.clip(cand, -delta, 1.0 + delta)
    best = max(_defect_at(prof, float(x), delta) for x in np.unique(cand))
    n = 129
    seen = set()
    while n <= max_grid:
        grid = np.linspace(-delta, 1.0 + delta, n)
        fresh = [float(x) for x in grid if x not in seen]
        seen.update(fresh)
        new = max((_defect_at(prof, x, delta) for x in fresh), default=best)
        improved = max(best, new)
        if improved - best <= refine_tol * max(improved, 1e-300):
            return improved
        best = improved
        n = 2 * n - 1
    return best


@dataclass(frozen=True)
class DefectReport:
    """Dyadic defect sequence D(2^-k) with a three-way verdict."""

    deltas: tuple
    defects: tuple
    verdict: str  # "in" | "not-in" | "inconclusive"
    tol: float

    def to_dict(self):
        return {
            "deltas": list(self.deltas),
            "defects": list(self.defects),
            "verdict": self.verdict,
            "tol": self.tol,
        }


def defect_sequence(measure: SegmentMeasure, *, k_max: int = 14, tol: float = 1e-2,
                    refine_tol: float = 0.01) -> DefectReport:
    """Evaluate D(2^-k) for k = 1..k_max and classify the measure.

    "in": the sequence is (weakly) decreasing and ends below `tol`.
    "not-in": it ends above `tol` and has stalled (under 10% relative
    decrease over the last three dyadic steps).  Everything else is
    "inconclusive".
    """
    deltas = [2.0 ** -k for k in range(1, k_max + 1)]
    defects = [class_a_defect(measure, d, refine_tol=refine_tol) for d in deltas]
    arr = np.asarray(defects)
    below = arr[-1] < tol
    nonincreasing = bool(np.all(arr[1:] <= arr[:-1] * 1.02 + 1e-12))
    if below and nonincreasing:
        verdict = "in"
    elif (not below) and arr.size >= 4 and arr[-1] >= 0.90 * arr[-4]:
        verdict = "not-in"
    else:
        verdict = "inconclusive"
    return DefectReport(tuple(deltas), tuple(defects), verdict, tol)


# ---------------------------------------------------------------------------
# modulus of continuity and its Dini integral


@dataclass(frozen=True)
class DiniReport:
    delta: Callable
    dini: float
    h_values: np.ndarray
    h_lengths: np.ndarray

    def h_integral(self, t):
        """int_0^t h(s) ds for the nonincreasing rearrangement h."""
        cl = np.concatenate([[0.0], np.cumsum(self.h_lengths)])
        ci = np.concatenate([[0.0], np.cumsum(self.h_values * self.h_lengths)])
        return np.interp(t, cl, ci)


def dini_modulus(profile, *, grid: int = 512) -> DiniReport:
    """Modulus of continuity of mu and its Dini integral int_0^1 Delta(t)/t dt.

    Delta(t) is exact for the piecewise-linear mu: the widest increment
    over any window of length t is attained with a window endpoint at a
    node.  Below the smallest node gap Delta(t) = (max slope) * t holds
    exactly, which pins the integral near zero; above it the integral
    uses the log-linear antiderivative on a geometric grid.
    """
    if isinstance(profile, SegmentMeasure):
        profile = profile.inverse()
    s = profile.s

    def delta(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            xs = np.concatenate([s, s - ti])
            out[i] = np.max(profile(xs + ti) - profile(xs))
        return out if out.size > 1 else float(out[0])

    order = np.argsort(profile.slopes)[::-1]
    h_values = profile.slopes[order]
    h_lengths = np.diff(profile.s)[order]

    gap = float(np.min(np.diff(s)))
    t0 = min(gap, 1.0)
    total = profile.max_slope * t0  # exact below the smallest gap
    if t0 < 1.0:
        tg = np.geomspace(t0, 1.0, grid)
        dv = np.asarray(delta(tg))
        dt = np.diff(tg)
        m = np.diff(dv) / dt
        c0 = dv[:-1] - m * tg[:-1]
        total += float(np.sum(m * dt + c0 * np.log(tg[1:] / tg[:-1])))
    return DiniReport(delta, total, _freeze(h_values), _freeze(h_lengths))


# ---------------------------------------------------------------------------
# condition integrals


@dataclass(frozen=True)
class MajorantSpec:
    """Nonnegative function carried through its logarithm.

    Either `log_samples = (t, log_values)` with log-linear interpolation
    between nodes, or a vectorized closed-form `log_func`.  Working in
    log space keeps double-exponential majorants representable.
    """

    a: float
    b: float
    log_samples: Optional[tuple] = None
    log_func: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if (self.log_samples is None) == (self.log_func is None):
            raise ValueError("provide exactly one of log_samples, log_func")
        if self.log_samples is not None:
            t, v = (np.asarray(x, dtype=float) for x in self.log_samples)
            if t.ndim != 1 or t.size != v.size or t.size < 2:
                raise InvalidMeasureError("majorant: malformed sample arrays")
            if not (np.diff(t) > 0).all():
                raise InvalidMeasureError("majorant: sample grid must be strictly increasing")
            if not np.isfinite(v).all():
                raise InvalidMeasureError(
                    "majorant: log samples must be finite; use log_func for blow-ups")
            object.__setattr__(self, "log_samples", (_freeze(t), _freeze(v)))

    def log_value(self, t):
        if self.log_func is not None:
            return self.log_func(np.asarray(t, dtype=float))
        ts, vs = self.log_samples
        return np.interp(t, ts, vs)

    def __call__(self, t):
        return np.exp(self.log_value(t))


def _int_log_linear(v1: float, v2: float, width: float) -> float:
    """int_0^width log(v(t)) dt for v linear from v1 to v2, v >= 0."""
    if width <= 0.0:
        return 0.0
    if v1 < 0.0 or v2 < 0.0:
        raise ValueError("log integrand needs nonnegative values")
    m = (v2 - v1) / width
    if abs(m) * width <= 1e-14 * max(abs(v1), abs(v2), 1e-300):
        v = 0.5 * (v1 + v2)
        return width * np.log(v) if v > 0 else -np.inf
    def F(v):
        return v * np.log(v) - v if v > 0 else 0.0
    return (F(v2) - F(v1)) / m


def _clip_linear(v1, v2, t1, t2, threshold, keep_below: bool):
    """Subinterval of [t1, t2] where the linear v is below (above) threshold."""
    lo_val, hi_val = (v1, v2)
    if keep_below:
        in1, in2 = v1 < threshold, v2 < threshold
    else:
        in1, in2 = v1 > threshold, v2 > threshold
    if in1 and in2:
        return t1, t2, v1, v2
    if not in1 and not in2:
        return None
    tc = t1 + (threshold - v1) / (v2 - v1) * (t2 - t1)
    if in1:
        return t1, tc, v1, threshold
    return tc, t2, threshold, v2


def _exact_logminus_linear(t: np.ndarray, v: np.ndarray) -> IntegralResult:
    """int log^-(v) dt for piecewise-linear v >= 0, exact."""
    total = 0.0
    for i in range(t.size - 1):
        if v[i] == 0.0 and v[i + 1] == 0.0:
            return IntegralResult(np.inf, True)
        clip = _clip_linear(v[i], v[i + 1], t[i], t[i + 1], 1.0, keep_below=True)
        if clip is None:
            continue
        p, q, a_val, b_val = clip
        total -= _int_log_linear(a_val, b_val, q - p)
    return IntegralResult(total, not np.isfinite(total))


def _exact_logplus_linear(t: np.ndarray, v: np.ndarray) -> IntegralResult:
    """int log^+(v) dt for piecewise-linear v, exact (always finite)."""
    total = 0.0
    for i in range(t.size - 1):
        clip = _clip_linear(v[i], v[i + 1], t[i], t[i + 1], 1.0, keep_below=False)
        if clip is None:
            continue
        p, q, a_val, b_val = clip
        total += _int_log_linear(a_val, b_val, q - p)
    return IntegralResult(total, False)


def condition_integral(kind: str, f, segment: Optional[tuple] = None, *,
                       tol: float = 1e-9) -> IntegralResult:
    """Integral condition on a function over its segment.

    kind="loglogplus": int log^+ log^+ f, the growth condition for
    majorants.  kind="logminus": int log^- f, the vanishing condition
    for densities.  `f` may be a MajorantSpec (robust log-space path,
    exact when sampled), a SegmentMeasure (its piecewise-constant
    density is used), a pair of arrays (t, values) interpolated
    linearly, or a vectorized callable together with `segment`.
    Divergent integrals come back flagged, not raised.
    """
    if kind not in ("loglogplus", "logminus"):
        raise ValueError("kind must be 'loglogplus' or 'logminus'")

    if isinstance(f, SegmentMeasure):
        t, g = f.t, f.density
        total = 0.0
        for i in range(g.size):
            width = t[i + 1] - t[i]
            if kind == "logminus":
                if g[i] <= 0.0:
                    return IntegralResult(np.inf, True)
                if g[i] < 1.0:
                    total -= width * np.log(g[i])
            else:
                if g[i] > 1.0 and np.log(g[i]) > 1.0:
                    total += width * np.log(np.log(g[i]))
        return IntegralResult(total, False)

    if isinstance(f, MajorantSpec):
        if f.log_samples is not None:
            t, logv = f.log_samples
            if kind == "logminus":
                # log^- f = max(-log f, 0) is piecewise linear here
                return _piecewise_linear_positive_part(t, -logv)
            # loglogplus: log^+ of the piecewise-linear log^+ f
            return _exact_logplus_linear(t, np.maximum(logv, 0.0))
        a, b = f.a, f.b
        if kind == "logminus":
            def phi(t):
                return np.maximum(-f.log_value(t), 0.0)
        else:
            def phi(t):
                lv = f.log_value(t)
                return np.where(lv > 1.0, np.log(np.maximum(lv, 1e-300)), 0.0)
        return endpoint_refined_integral(phi, a, b, tol=tol)

    if isinstance(f, tuple) and len(f) == 2 and not callable(f[0]):
        t, v = (np.asarray(x, dtype=float) for x in f)
        if kind == "logminus":
            return _exact_logminus_linear(t, v)
        def phi(x):
            vv = np.interp(x, t, v)
            lg = np.where(vv > 1.0, np.log(np.maximum(vv, 1e-300)), 0.0)
            return np.where(lg > 1.0, np.log(np.maximum(lg, 1e-300)), 0.0)
        return endpoint_refined_integral(phi, t[0], t[-1], tol=tol)

    if callable(f):
        if segment is None:
            raise ValueError("a callable integrand needs an explicit segment=(a, b)")
        a, b = segment
        if kind == "logminus":
            def phi(t):
                with np.errstate(divide="ignore"):
                    return np.maximum(-np.log(f(t)), 0.0)
        else:
            def phi(t):
                with np.errstate(divide="ignore"):
                    lg = np.log(np.maximum(f(t), 1e-300))
                    lg = np.maximum(lg, 0.0)
                    return np.where(lg > 1.0, np.log(np.maximum(lg, 1e-300)), 0.0)
        return endpoint_refined_integral(phi, a, b, tol=tol)

    raise TypeError("unsupported integrand type for condition_integral")


def _piecewise_linear_positive_part(t: np.ndarray, w: np.ndarray) -> IntegralResult:
    """int max(w, 0) dt for piecewise-linear w, exact."""
    total = 0.0
    for i in range(t.size - 1):
        clip = _clip_linear(w[i], w[i + 1], t[i], t[i + 1], 0.0, keep_below=False)
        if clip is None:
            continue
        p, q, a_val, b_val = clip
        total += 0.5 * (a_val + b_val) * (q - p)
    return IntegralResult(total, False)


# ---------------------------------------------------------------------------
# measures built from majorants


def measure_from_majorant(spec: MajorantSpec, scale: str = "subharmonic", *,
                          n_nodes: int = 2049) -> tuple:
    """Distribution with density damped where the majorant is large.

    scale="subharmonic" uses w = min(1, 1/M) = exp(-log^+ M), for
    majorants of the function itself; scale="modulus" uses
    w = min(1, 1/log^+ M), for majorants of a modulus |f| with
    u = log|f|.  With the modulus scale log^- w = log^+ log^+ M holds
    identically, so finite loglogplus input yields finite logminus
    output.  Returns (measure, normalization constant).
    """
    if scale not in ("subharmonic", "modulus"):
        raise ValueError("scale must be 'subharmonic' or 'modulus'")
    a, b = spec.a, spec.b
    base = np.linspace(a, b, n_nodes)
    width = b - a
    collar = width * np.geomspace(1e-9, 0.25, 32)
    grids = [base, a + collar, b - collar]
    if a < 0.0 < b:
        inner = np.geomspace(1e-9, 0.5, 32) * min(-a, b)
        grids += [inner, -inner]
    t = np.unique(np.concatenate(grids))
    t = t[(t >= a) & (t <= b)]

    logm = np.asarray(spec.log_value(t), dtype=float)
    logp = np.maximum(logm, 0.0)
    if scale == "subharmonic":
        with np.errstate(over="ignore"):
            w = np.exp(-logp)
    else:
        w = 1.0 / np.maximum(logp, 1.0)
    w = np.where(np.isfinite(w), w, 0.0)

    inc = 0.5 * (w[1:] + w[:-1]) * np.diff(t)
    raw = np.concatenate([[0.0], np.cumsum(inc)])
    z = float(raw[-1])
    if z <= 0.0:
        raise DegenerateMeasureError("majorant forces an identically zero density")
    nu = raw / z
    # drop nodes where the cumulative sum stalled (density at or below float
    # resolution), then stretch the kept range back onto [a, b]
    keep = np.concatenate([[True], np.diff(nu) > 0.0])
    t, nu = t[keep], nu[keep]
    if t.size < 2:
        raise DegenerateMeasureError("density vanishes outside a negligible set")
    t[0], t[-1] = a, b
    nu[-1] = 1.0
    return SegmentMeasure(t, nu), z


# ---------------------------------------------------------------------------
# file formats


def write_measure_csv(path, measure: SegmentMeasure):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "nu"])
        for ti, vi in zip(measure.t, measure.nu):
            wr.writerow([repr(float(ti)), repr(float(vi))])


def _read_two_column(path, header):
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        try:
            head = next(rd)
        except StopIteration:
            raise InvalidMeasureError(f"{path}: empty file") from None
        if [h.strip() for h in head] != header:
            raise InvalidMeasureError(f"{path}: expected header {','.join(header)}")
        rows = []
        for ln, row in enumerate(rd, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise InvalidMeasureError(f"{path}:{ln}: expected two columns")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                raise InvalidMeasureError(f"{path}:{ln}: non-numeric entry") from None
    if len(rows) < 2:
        raise InvalidMeasureError(f"{path}: need at least two rows")
    arr = np.asarray(rows, dtype=float)
    if not np.isfinite(arr).all():
        raise InvalidMeasureError(f"{path}: NaN or Inf entry")
    if not (np.diff(arr[:, 0]) > 0).all():
        raise InvalidMeasureError(f"{path}: first column must be strictly increasing")
    return arr[:, 0], arr[:, 1]


def read_measure_csv(path) -> SegmentMeasure:
    t, nu = _read_two_column(path, ["t", "nu"])
    return SegmentMeasure(t, nu)


def read_density_csv(path) -> tuple:
    """Sampled density: columns t, density; values nonnegative."""
    t, g = _read_two_column(path, ["t", "density"])
    if (g < 0).any():
        raise InvalidMeasureError(f"{path}: density values must be nonnegative")
    return t, g


def write_density_csv(path, t, g):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "density"])
        for ti, gi in zip(t, g):
            wr.writerow([repr(float(ti)), repr(float(gi))])
