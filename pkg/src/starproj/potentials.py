"""Logarithmic potentials of monotone profiles on the segment and the unit circle.

The circle potential of a profile mu over [0, 2pi] is

    u(z) = (1/pi) * integral_0^1 log|e^{2 pi i s} - z| dmu(s),

evaluated exactly per linear segment of mu.  On the circle itself the kernel
log|e^{i theta} - e^{i psi}| = log(2 |sin((theta - psi)/2)|) integrates in
closed form through the Clausen function Cl2, so boundary values cost one
Cl2 call per profile node and carry no quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d
from scipy.special import zeta

from .measures import InverseProfile
from .quadrature import adaptive_panels

__all__ = [
    "clausen",
    "clausen_series",
    "segment_log_potential",
    "circle_log_potential",
    "potential_continuity_probe",
    "ContinuityReport",
]

TWO_PI = 2.0 * np.pi

# Cl2(x) = x - x log|x| + sum_{n>=1} zeta(2n)/(n(2n+1)) (x/2pi)^{2n} x
# for |x| <= pi; after range reduction the tail decays like 4^{-n}, so 32
# terms reach machine precision.
_N_TERMS = 32
_ns = np.arange(1, _N_TERMS + 1)
_CL2_COEFF = zeta(2 * _ns) / (_ns * (2 * _ns + 1) * (TWO_PI) ** (2 * _ns))


def _reduce_angle(x):
    """Map x into (-pi, pi] modulo 2pi."""
    return x - TWO_PI * np.round(x / TWO_PI)


def clausen(x):
    """Clausen function Cl2(x) = sum_k sin(kx)/k^2, vectorized.

    Uses the log-plus-zeta power series after range reduction; accurate to
    machine precision for all real x.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    m = _reduce_angle(np.atleast_1d(x))
    am = np.abs(m)
    safe = np.where(am > 0.0, am, 1.0)
    out = m - m * np.log(safe)
    m2 = m * m
    term = m.copy()
    for c in _CL2_COEFF:
        term *= m2
        out += c * term
    if scalar:
        return float(out[0])
    return out


def clausen_series(x, tol=1.0e-12):
    """Direct sine-series evaluation of Cl2, truncated where k^-2 < tol/2.

    Kahan-compensated summation.  Orders of magnitude slower than `clausen`;
    kept as an independent cross-check.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    k_max = int(np.ceil(np.sqrt(2.0 / tol)))
    total = np.zeros_like(xs)
    comp = np.zeros_like(xs)
    block = 1 << 15
    for start in range(1, k_max + 1, block):
        ks = np.arange(start, min(start + block, k_max + 1), dtype=float)
        part = np.sin(np.outer(xs, ks)) @ (1.0 / (ks * ks))
        y = part - comp
        t = total + y
        comp = (t - total) - y
        total = t
    if scalar:
        return float(total[0])
    return total


def segment_log_potential(profile, x):
    """N(x) = integral log|x - t| dmu(t) for a piecewise-linear profile mu.

    Exact per segment: against a constant density the kernel has
    antiderivative (t - x) log|t - x| - t, continuous across t = x.
    """
    if not isinstance(profile, InverseProfile):
        raise TypeError("segment_log_potential expects an InverseProfile")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)[:, None]
    t = profile.s[None, :]
    d = t - xs
    ad = np.abs(d)
    g = np.where(ad > 0.0, d * np.log(np.where(ad > 0.0, ad, 1.0)), 0.0) - t
    out = np.diff(g, axis=1) @ profile.slopes
    if scalar:
        return float(out[0])
    return out


def _boundary_values(profile, psi):
    """u(e^{i psi}) via the Clausen closed form, vectorized over psi.

    Per segment the exact value is m_i (Cl2(theta_i - psi) - Cl2(theta_{i+1}
    - psi)) / (2 pi^2).  For a segment much narrower than its distance to psi
    that difference cancels catastrophically once m_i is large (graded
    profiles reach slopes ~1e58), so those segments switch to the midpoint
    rule against the mass increment dv_i, with the h^2/24 curvature
    correction; the remaining error is O((h/d)^4) per segment.
    """
    theta = TWO_PI * profile.s
    h = np.diff(theta)
    dv = np.diff(profile.values)
    m = profile.slopes
    out = np.empty(psi.shape)
    chunk = max(1, (1 << 21) // max(h.size, 1))
    for lo in range(0, psi.size, chunk):
        p = psi[lo : lo + chunk, None]
        off = _reduce_angle(0.5 * (theta[:-1] + theta[1:])[None, :] - p)
        dist = np.abs(off) - 0.5 * h[None, :]
        far = dist > 100.0 * h[None, :]
        sin_half = 2.0 * np.abs(np.sin(0.5 * off))
        safe = np.where(far & (sin_half > 0.0), sin_half, 1.0)
        kernel = np.log(safe) - np.where(far, h[None, :] ** 2 / (24.0 * safe**2), 0.0)
        far_sum = np.sum(np.where(far, dv[None, :] * kernel, 0.0), axis=1) / np.pi
        ca = clausen(theta[None, :-1] - p)
        cb = clausen(theta[None, 1:] - p)
        near = np.where(far, 0.0, m[None, :] * (ca - cb))
        out[lo : lo + chunk] = far_sum + np.sum(near, axis=1) / (2.0 * np.pi**2)
    return out


def circle_log_potential(profile, z, tol=1.0e-10, circle_tol=1.0e-9):
    """u(z) = (1/pi) integral_0^1 log|e^{2 pi i s} - z| dmu(s).

    On the circle (within circle_tol of |z| = 1) the exact Clausen path is
    used; elsewhere the integrand is smooth and adaptive panels per profile
    segment suffice, with an extra split at arg z when z is near the circle.
    """
    if not isinstance(profile, InverseProfile):
        raise TypeError("circle_log_potential expects an InverseProfile")
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zs = np.atleast_1d(z).ravel()
    out = np.empty(zs.size)
    on_circle = np.abs(np.abs(zs) - 1.0) <= circle_tol
    if np.any(on_circle):
        psi = np.mod(np.angle(zs[on_circle]), TWO_PI)
        out[on_circle] = _boundary_values(profile, psi)
    for idx in np.flatnonzero(~on_circle):
        out[idx] = _offcircle_value(profile, complex(zs[idx]), tol)
    if scalar:
        return float(out[0])
    return out.reshape(np.atleast_1d(z).shape)


def _offcircle_value(profile, z, tol):
    if z == 0.0:
        # log|e^{2 pi i s}| = 0, but the mass integral is still exact.
        return 0.0

    def f(s):
        return np.log(np.abs(np.exp(TWO_PI * 1j * s) - z))

    cuts = list(profile.s)
    if 0.3 < abs(z) < 3.0:
        s_star = np.mod(np.angle(z), TWO_PI) / TWO_PI
        cuts = sorted(set(cuts) | {float(s_star)})
    cuts = np.asarray(cuts)
    lo, hi = cuts[:-1], cuts[1:]
    # density on each panel is the slope of the enclosing profile segment
    seg = np.clip(np.searchsorted(profile.s, 0.5 * (lo + hi)) - 1, 0, profile.slopes.size - 1)
    w = profile.slopes[seg]
    return adaptive_panels(f, lo, hi, weight=w, tol=tol) / np.pi


@dataclass(frozen=True)
class ContinuityReport:
    """Empirical modulus of continuity of the circle potential.

    scales holds dyadic window widths as fractions of the full circle;
    oscillation and refined_oscillation are the largest windowed
    max-minus-min of u on the base grid and on its 2x refinement.
    """

    grid_size: int
    scales: np.ndarray
    oscillation: np.ndarray
    refined_oscillation: np.ndarray

    @property
    def shrinking(self) -> bool:
        """True when the finest-scale oscillation has dropped to less than
        half of the coarsest one (both measured on the refined grid)."""
        top = self.refined_oscillation[0]
        bottom = self.refined_oscillation[-1]
        return bool(bottom <= 0.5 * top + 1.0e-12)

    def to_dict(self):
        return {
            "grid_size": int(self.grid_size),
            "scales": [float(v) for v in self.scales],
            "oscillation": [float(v) for v in self.oscillation],
            "refined_oscillation": [float(v) for v in self.refined_oscillation],
            "shrinking": self.shrinking,
        }


def _dyadic_oscillations(values, n_scales):
    n = values.size
    osc = np.empty(n_scales)
    for k in range(1, n_scales + 1):
        w = max(2, n >> k)
        hi = maximum_filter1d(values, size=w + 1, mode="wrap")
        lo = minimum_filter1d(values, size=w + 1, mode="wrap")
        osc[k - 1] = float(np.max(hi - lo))
    return osc


def potential_continuity_probe(profile, grid_size=512):
    """Sample u on a uniform psi-grid and its refinement; report the windowed
    oscillation at dyadic scales 2^-k of the circle.

    Corroborates the defect-based class verdict: a continuous limit potential
    shows oscillations shrinking with the scale, while a genuine discontinuity
    keeps them bounded below under refinement.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    n_scales = max(1, int(np.log2(grid_size)) - 1)
    psi = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    psi2 = np.linspace(0.0, TWO_PI, 2 * grid_size, endpoint=False)
    u1 = _boundary_values(profile, psi)
    u2 = _boundary_values(profile, psi2)
    osc1 = _dyadic_oscillations(u1, n_scales)
    osc2 = _dyadic_oscillations(u2, n_scales)
    return ContinuityReport(
        grid_size=grid_size,
        scales=0.5 ** np.arange(1, n_scales + 1),
        oscillation=osc1,
        refined_oscillation=osc2,
    )
