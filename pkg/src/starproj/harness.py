"""Numerical harness for the growth theorems: angular-integral profiles,
the half-plane boundary-growth check, vertical-line profiles on the square,
the sector identity, and the log-log weight construction.

Everything here produces profiling reports: curves plus fitted constants.
The theorems guarantee finiteness of the constants, never their values, so
tests pin closed-form cases and assert finiteness/stability elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .measures import SegmentMeasure, condition_integral
from .quadrature import adaptive_gauss, integrate_against_measure

__all__ = [
    "TestFunction",
    "UnsupportedFunctionError",
    "builtin_test_functions",
    "SectorSpec",
    "MatsaevWeight",
    "ProfileReport",
    "LineProfileReport",
    "PhragmenReport",
    "MatsaevReport",
    "eval_test_function",
    "theorem1_profile",
    "phragmen_check",
    "levinson_profile",
    "matsaev_weight",
    "psi_weight",
    "matsaev_profile",
    "carleman_identity_residual",
]

TWO_PI = 2.0 * np.pi


class UnsupportedFunctionError(TypeError):
    """Operation requires a function variant with extra structure."""


@dataclass(frozen=True)
class TestFunction:
    """Tagged test input for the theorem harness.

    variant is one of:
      harmonic-poly   u = Re or Im of a complex polynomial (coeffs low-first)
      log-abs-entire  u = sum_j log|z - a_j| over the zero list
      radial-log      u = c * log+|z|
      half-plane-mobius u = log|(z - i)/(z + i)|
      square-pole     u = Re(1/(1 - z))
    """

    variant: str
    name: str = ""
    coeffs: tuple = ()
    part: str = "re"
    zeros: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        known = {"harmonic-poly", "log-abs-entire", "radial-log",
                 "half-plane-mobius", "square-pole"}
        if self.variant not in known:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "harmonic-poly":
            if len(self.coeffs) == 0:
                raise ValueError("harmonic-poly needs coefficients")
            if self.part not in ("re", "im"):
                raise ValueError("part must be 're' or 'im'")
        if self.variant == "log-abs-entire" and len(self.zeros) == 0:
            raise ValueError("log-abs-entire needs at least one zero")

    @property
    def harmonic(self) -> bool:
        return self.variant in ("harmonic-poly", "half-plane-mobius", "square-pole")

    def __call__(self, z):
        return eval_test_function(self, z)

    def plus(self, z):
        return np.maximum(self(z), 0.0)

    def radial_derivative(self, z):
        """du/d|z| along the ray through z; analytic, harmonic-poly only."""
        if self.variant != "harmonic-poly":
            raise UnsupportedFunctionError(
                "analytic radial derivative is only available for harmonic-poly"
            )
        z = np.asarray(z, dtype=complex)
        dp = np.polynomial.polynomial.polyval(z, _polyder(self.coeffs))
        w = dp * np.exp(1j * np.angle(z))
        return w.real if self.part == "re" else w.imag


def _polyder(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def eval_test_function(u: TestFunction, z):
    z = np.asarray(z, dtype=complex)
    if u.variant == "harmonic-poly":
        p = np.polynomial.polynomial.polyval(z, np.asarray(u.coeffs, dtype=complex))
        out = p.real if u.part == "re" else p.imag
    elif u.variant == "log-abs-entire":
        out = np.zeros(z.shape)
        for a in u.zeros:
            d = np.abs(z - a)
            if np.any(d == 0.0):
                raise ZeroDivisionError("evaluation at a declared zero")
            out = out + np.log(d)
    elif u.variant == "radial-log":
        out = u.scale * np.maximum(np.log(np.maximum(np.abs(z), 1.0e-300)), 0.0)
    elif u.variant == "half-plane-mobius":
        den = np.abs(z + 1j)
        num = np.abs(z - 1j)
        if np.any(den == 0.0) or np.any(num == 0.0):
            raise ZeroDivisionError("evaluation at a singular point")
        out = np.log(num / den)
    else:  # square-pole
        d = 1.0 - z
        if np.any(d == 0.0):
            raise ZeroDivisionError("evaluation at the pole z = 1")
        out = (1.0 / d).real
    if out.ndim == 0:
        return float(out)
    return out


def builtin_test_functions() -> dict:
    """The stock family the falsification suites run over."""
    fns = [
        TestFunction("harmonic-poly", name="re-z", coeffs=(0.0, 1.0), part="re"),
        TestFunction("harmonic-poly", name="im-z", coeffs=(0.0, 1.0), part="im"),
        TestFunction("harmonic-poly", name="re-z2", coeffs=(0.0, 0.0, 1.0), part="re"),
        TestFunction("harmonic-poly", name="im-z3", coeffs=(0.0, 0.0, 0.0, 1.0), part="im"),
        TestFunction("log-abs-entire", name="log-two-zeros", zeros=(0.5, -1.0 + 0.5j)),
        TestFunction("radial-log", name="radial-log", scale=1.0),
        TestFunction("half-plane-mobius", name="half-plane-mobius"),
        TestFunction("square-pole", name="square-pole"),
    ]
    return {f.name: f for f in fns}


# ---------------------------------------------------------------------------
# angular integrals against nu vs the radial sup


@dataclass(frozen=True)
class ProfileReport:
    """Curves from an angular-integral profile run."""

    grid: np.ndarray
    L: np.ndarray
    V: np.ndarray
    S: np.ndarray
    c_fit: float
    A: float
    unbounded: bool = False
    W: Optional[np.ndarray] = None

    def to_dict(self):
        out = {
            "grid": [float(v) for v in self.grid],
            "L": [float(v) for v in self.L],
            "V": [float(v) for v in self.V],
            "S": [float(v) for v in self.S],
            "c_fit": float(self.c_fit),
            "A": float(self.A),
            "unbounded": bool(self.unbounded),
        }
        if self.W is not None:
            out["W"] = [float(v) for v in self.W]
        return out


def _angular_plus_integral(u: TestFunction, nu: SegmentMeasure, t: float) -> float:
    return integrate_against_measure(lambda th: u.plus(t * np.exp(1j * th)), nu)


def _radial_sup(u: TestFunction, t: float, n_scan: int = 2048) -> float:
    theta = np.linspace(0.0, TWO_PI, n_scan, endpoint=False)
    vals = u(t * np.exp(1j * theta))
    k = int(np.argmax(vals))
    lo, hi = theta[k] - TWO_PI / n_scan, theta[k] + TWO_PI / n_scan
    res = minimize_scalar(
        lambda th: -u(t * np.exp(1j * th)), bounds=(lo, hi), method="bounded",
        options={"xatol": 1.0e-12},
    )
    return max(float(vals[k]), float(-res.fun))


def theorem1_profile(u: TestFunction, nu: SegmentMeasure, t_grid, A: float = 1.0,
                     *, integrated: bool = False, t0: Optional[float] = None) -> ProfileReport:
    """Profile the angular-integral growth bound.

    L(t) = integral of u+ (t e^{i theta}) d nu(theta), V = its monotone
    envelope, S(t) = sup over theta of u(t e^{i theta}); the fitted constant
    is the largest S(t)/V(A t) over the grid with the 0/0 -> 0 convention.
    With integrated=True the report also carries W(t) = integral of L over
    [t0, t] and the fit compares S(t) against W(A t)/t.
    """
    if A < 1.0:
        raise ValueError("A must be at least 1")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or not (np.diff(t_grid) > 0).all():
        raise ValueError("t_grid must be increasing with at least two points")
    if not (t_grid > 0).all():
        raise ValueError("t_grid must be positive")
    # L is needed on the grid and at the dilated points A*t; evaluating on
    # the union keeps V(A t) an exact lookup instead of an interpolation
    grid_all = np.unique(np.concatenate([t_grid, A * t_grid]))
    L_all = np.array([_angular_plus_integral(u, nu, t) for t in grid_all])
    V_all = np.maximum.accumulate(L_all)
    pos = np.searchsorted(grid_all, A * t_grid)
    V_at = V_all[pos]
    L = L_all[np.searchsorted(grid_all, t_grid)]
    V = np.maximum.accumulate(L)
    S = np.array([_radial_sup(u, t) for t in t_grid])

    W = None
    if integrated:
        base = t_grid[0] if t0 is None else float(t0)

        def L_at(radii):
            radii = np.atleast_1d(np.asarray(radii, dtype=float))
            return np.array([_angular_plus_integral(u, nu, float(s)) for s in radii])

        W_all = np.empty_like(grid_all)
        acc = 0.0
        prev = base
        for i, t in enumerate(grid_all):
            if t > prev:
                acc += adaptive_gauss(L_at, prev, t, tol=1.0e-9)
                prev = t
            W_all[i] = acc
        W = W_all[np.searchsorted(grid_all, t_grid)]
        bound = W_all[pos] / t_grid
    else:
        bound = V_at

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(S > 0.0, S / bound, 0.0)
    unbounded = bool(np.any((bound == 0.0) & (S > 0.0)))
    c_fit = float(np.inf) if unbounded else float(np.max(ratio)) if ratio.size else 0.0
    return ProfileReport(grid=t_grid, L=L, V=V, S=S, c_fit=c_fit, A=float(A),
                         unbounded=unbounded, W=W)


# ---------------------------------------------------------------------------
# Phragmen-Lindelof-type check on the upper half-plane


@dataclass(frozen=True)
class PhragmenReport:
    h1_boundary: bool
    h2_decay: bool
    conclusion: bool
    boundary_max: float
    tail_ratio: np.ndarray
    interior_max: float
    violation: bool

    def to_dict(self):
        return {
            "h1_boundary": self.h1_boundary,
            "h2_decay": self.h2_decay,
            "conclusion": self.conclusion,
            "boundary_max": float(self.boundary_max),
            "tail_ratio": [float(v) for v in self.tail_ratio],
            "interior_max": float(self.interior_max),
            "violation": self.violation,
        }


def phragmen_check(u: TestFunction, nu: SegmentMeasure, t_grid, *,
                   boundary_offset: float = 1.0e-4, tol: float = 1.0e-3) -> PhragmenReport:
    """Check the hypotheses and conclusion of the half-plane growth theorem.

    H1: u stays <= tol just above the real axis (boundary limsup <= 0).
    H2: t^{-1} L(t) decays to ~0 along the grid.
    C:  u <= tol on an upper-half-disk sample.
    The theorem promises H1 and H2 imply C; `violation` reports the
    falsifying combination and must never be True.
    """
    a, b = nu.segment
    if abs(a) > 1.0e-9 or abs(b - np.pi) > 1.0e-9:
        raise ValueError("phragmen_check needs a measure on [0, pi]")
    t_grid = np.asarray(t_grid, dtype=float)
    xs = np.linspace(-t_grid[-1], t_grid[-1], 201)
    boundary_max = float(np.max(u(xs + 1j * boundary_offset)))
    h1 = boundary_max <= tol

    q = np.array([
        integrate_against_measure(lambda th: u.plus(t * np.exp(1j * th)), nu) / t
        for t in t_grid
    ])
    h2 = bool(q[-1] <= tol and q[-1] <= 0.5 * q[0] + tol)

    rng = np.random.default_rng(42)
    rr = np.sqrt(rng.uniform(0.0, 1.0, 400)) * t_grid[-1] * 0.5
    th = rng.uniform(0.0, np.pi, 400)
    sample = rr * np.exp(1j * th) + 1j * boundary_offset
    interior_max = float(np.max(u(sample)))
    concl = interior_max <= tol
    return PhragmenReport(
        h1_boundary=h1, h2_decay=h2, conclusion=concl,
        boundary_max=boundary_max, tail_ratio=q, interior_max=interior_max,
        violation=bool(h1 and h2 and not concl),
    )


# ---------------------------------------------------------------------------
# vertical-line profiles on the square


@dataclass(frozen=True)
class LineProfileReport:
    grid: np.ndarray
    V: np.ndarray
    sup_V: float
    sup_K: float
    hypothesis: bool

    def to_dict(self):
        return {
            "grid": [float(v) for v in self.grid],
            "V": [float(v) for v in self.V],
            "sup_V": float(self.sup_V),
            "sup_K": float(self.sup_K),
            "hypothesis": bool(self.hypothesis),
        }


def levinson_profile(u: TestFunction, nu: SegmentMeasure, x_grid,
                     K=((-0.5, 0.5), (-0.5, 0.5))) -> LineProfileReport:
    """V(x) = integral of u+(x + i y) d nu(y) per vertical line of the square,
    with the sup of u over the compact rectangle K reported alongside.

    hypothesis records whether sup_x V(x) <= 1, the normalization under which
    the theorem bounds sup_K u.
    """
    a, b = nu.segment
    if abs(a + 1.0) > 1.0e-9 or abs(b - 1.0) > 1.0e-9:
        raise ValueError("levinson_profile needs a measure on [-1, 1]")
    (kx0, kx1), (ky0, ky1) = K
    if not (-1.0 < kx0 < kx1 < 1.0 and -1.0 < ky0 < ky1 < 1.0):
        raise ValueError("K must be a rectangle strictly inside the open square")
    x_grid = np.asarray(x_grid, dtype=float)
    if (np.abs(x_grid) >= 1.0).any():
        raise ValueError("x_grid must lie in (-1, 1)")
    V = np.array([
        integrate_against_measure(lambda y: u.plus(x + 1j * y), nu) for x in x_grid
    ])
    gx = np.linspace(kx0, kx1, 101)
    gy = np.linspace(ky0, ky1, 101)
    Z = gx[None, :] + 1j * gy[:, None]
    sup_K = float(np.max(u(Z)))
    sup_V = float(np.max(V))
    return LineProfileReport(grid=x_grid, V=V, sup_V=sup_V, sup_K=sup_K,
                             hypothesis=bool(sup_V <= 1.0 + 1.0e-12))


# ---------------------------------------------------------------------------
# Sector identity


@dataclass(frozen=True)
class SectorSpec:
    """Annular sector around the upper vertical axis.

    Opening (a*pi, (1-a)*pi) with 0 < a < 1/4; b = 1/(1-2a) is the exponent
    of the power map that straightens it onto a half-annulus.
    """

    r: float
    R: float
    a: float

    def __post_init__(self):
        if not (0.0 < self.r < self.R):
            raise ValueError("need 0 < r < R")
        if not (0.0 < self.a < 0.25):
            raise ValueError("need 0 < a < 1/4")

    @property
    def b(self) -> float:
        return 1.0 / (1.0 - 2.0 * self.a)

    def weight(self, theta):
        """S(theta, a) = sin(b (theta - a pi)), vanishing on both sides."""
        return np.sin(self.b * (theta - self.a * np.pi))


def _simpson_rule(lo, hi, n):
    """Composite Simpson nodes/weights with n subintervals (n even).

    A fixed-order rule on purpose: its h^4 error makes convergence under
    refinement observable, which is part of what the identity check reports.
    """
    if n < 2 or n % 2:
        raise ValueError("quad_n must be an even integer >= 2")
    nodes = np.linspace(lo, hi, n + 1)
    h = (hi - lo) / n
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return nodes, w * (h / 3.0)


def carleman_identity_residual(u: TestFunction, sector: SectorSpec, quad_n: int = 512) -> float:
    """Absolute residual of the four-term sector identity.

    For u harmonic on a neighborhood of the closed sector, the weighted outer
    arc, inner arc, inner radial-derivative, and side integrals cancel
    exactly; the returned value isolates the composite quadrature error.
    """
    if u.variant != "harmonic-poly":
        raise UnsupportedFunctionError("the identity check needs a harmonic-poly variant")
    r, R, a, b = sector.r, sector.R, sector.a, sector.b
    lo, hi = a * np.pi, (1.0 - a) * np.pi
    th, w = _simpson_rule(lo, hi, quad_n)
    s = sector.weight(th)
    outer = 2.0 * b * R ** (-b) * np.sum(w * s * u(R * np.exp(1j * th)))
    inner = -b * (r ** (-b) + r**b * R ** (-2.0 * b)) * np.sum(w * s * u(r * np.exp(1j * th)))
    dr = -(r ** (1.0 - b) - r ** (1.0 + b) * R ** (-2.0 * b)) * np.sum(
        w * s * u.radial_derivative(r * np.exp(1j * th))
    )
    x, wx = _simpson_rule(r, R, quad_n)
    kern = x ** (-b - 1.0) - x ** (b - 1.0) * R ** (-2.0 * b)
    sides = b * np.sum(
        wx * kern * (u(x * np.exp(1j * lo)) + u(x * np.exp(1j * hi)))
    )
    return float(abs(outer + inner + dr + sides))


# ---------------------------------------------------------------------------
# Log-log weights


@dataclass(frozen=True)
class MatsaevWeight:
    """Weight construction: phi nondecreasing on [0, 1], tau in (0, 1/4).

    lam(theta) = min(theta/pi, 1 - theta/pi, tau)
    f(theta) = lam^2 phi(sin(pi lam / 2))        (the produced weight)
    psi(theta) = integral_0^lam sin(b(a)(theta - a pi)) phi(sin pi a) da
    with b(a) = 1/(1 - 2a).
    """

    phi: Callable
    tau: float
    name: str = ""

    def __post_init__(self):
        if not (0.0 < self.tau < 0.25):
            raise ValueError("tau must lie in (0, 1/4)")

    @property
    def beta(self) -> float:
        return 1.0 / (1.0 - 2.0 * self.tau)

    def lam(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.minimum(np.minimum(theta / np.pi, 1.0 - theta / np.pi), self.tau)

    def margin_ok(self, delta: float) -> bool:
        """Whether beta < 1 + delta, the exponent margin the theorem asks for."""
        return self.beta < 1.0 + delta


def matsaev_weight(w: MatsaevWeight, theta):
    """f(theta) = lam(theta)^2 phi(sin(pi lam(theta)/2)), vectorized."""
    lam = w.lam(theta)
    out = lam * lam * np.asarray(w.phi(np.sin(0.5 * np.pi * lam)), dtype=float)
    if out.ndim == 0:
        return float(out)
    return out


def psi_weight(w: MatsaevWeight, theta, tol: float = 1.0e-10):
    """psi(theta) by adaptive quadrature in the opening parameter a."""
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty(theta_arr.shape)
    for i, th in enumerate(theta_arr):
        lam = float(w.lam(th))
        if lam <= 0.0:
            out[i] = 0.0
            continue

        def f(av):
            av = np.asarray(av, dtype=float)
            b = 1.0 / (1.0 - 2.0 * av)
            return np.sin(b * (th - av * np.pi)) * np.asarray(
                w.phi(np.sin(np.pi * av)), dtype=float
            )

        out[i] = adaptive_gauss(f, 0.0, lam, tol=tol)
    if np.asarray(theta).ndim == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class MatsaevReport:
    """Profile of the weighted-plus-integral bound on a log-abs function.

    The bound only holds past some radius r0, so the fit ignores the
    initial stretch where the minus-part envelope is still zero;
    r0_index marks where the comparison starts.
    """

    grid: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    V: np.ndarray
    c_fit: float
    r0_index: int
    unbounded: bool = False

    def to_dict(self):
        return {
            "grid": [float(v) for v in self.grid],
            "upper": [float(v) for v in self.upper],
            "lower": [float(v) for v in self.lower],
            "V": [float(v) for v in self.V],
            "c_fit": float(self.c_fit),
            "r0_index": int(self.r0_index),
            "unbounded": bool(self.unbounded),
        }


def matsaev_profile(u: TestFunction, w: MatsaevWeight, r_grid) -> MatsaevReport:
    """Compare the f-weighted integral of u+ against the phi-weighted
    integral of u- on circles |z| = r.

    upper(r) = integral_0^pi u+(r e^{i theta}) f(theta) d theta
    lower(r) = integral_0^pi u-(r e^{i theta}) phi(sin theta) d theta
    V = monotone envelope of lower; c_fit = max upper / V over the grid
    points past the first positive V (0/0 -> 0).
    """
    if u.variant != "log-abs-entire":
        raise UnsupportedFunctionError("the weighted profile runs on log-abs-entire functions")
    r_grid = np.asarray(r_grid, dtype=float)
    upper = np.empty(r_grid.shape)
    lower = np.empty(r_grid.shape)
    for i, r in enumerate(r_grid):
        upper[i] = adaptive_gauss(
            lambda th: u.plus(r * np.exp(1j * th)) * matsaev_weight(w, th),
            0.0, np.pi, tol=1.0e-9,
        )
        lower[i] = adaptive_gauss(
            lambda th: np.maximum(-u(r * np.exp(1j * th)), 0.0)
            * np.asarray(w.phi(np.sin(th)), dtype=float),
            0.0, np.pi, tol=1.0e-9,
        )
    V = np.maximum.accumulate(lower)
    positive = np.nonzero(V > 0.0)[0]
    if positive.size == 0:
        unbounded = bool(np.any(upper > 0.0))
        c_fit = float(np.inf) if unbounded else 0.0
        return MatsaevReport(grid=r_grid, upper=upper, lower=lower, V=V,
                             c_fit=c_fit, r0_index=r_grid.size, unbounded=unbounded)
    k0 = int(positive[0])
    ratio = np.where(upper[k0:] > 0.0, upper[k0:] / V[k0:], 0.0)
    return MatsaevReport(grid=r_grid, upper=upper, lower=lower, V=V,
                         c_fit=float(np.max(ratio)), r0_index=k0, unbounded=False)


def log_condition_of_weight(w: MatsaevWeight, n: int = 2049):
    """Feed f through the exact log-minus integral on a sampled grid."""
    theta = np.linspace(0.0, np.pi, n)
    return condition_integral("logminus", (theta, matsaev_weight(w, theta)))
