"""Adaptive Gauss-Legendre quadrature on weighted panels.

One code path serves every smooth integral in the package: angular
integrals against a piecewise-linear distribution (piecewise-constant
density becomes a per-panel weight), log-potential integrals off the
unit circle, and the weight integrals of the sector harness.  Endpoint
blow-ups (log and power singularities of the condition integrals) are
handled by geometric truncation with a divergence flag instead of an
error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(7)
_GL_NODES_HI, _GL_WEIGHTS_HI = np.polynomial.legendre.leggauss(15)


def _panel_sums(f, lo, hi, nodes, weights):
    """Gauss-Legendre sums over many panels at once; f is vectorized."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    return half * (vals @ weights)


def adaptive_panels(f, lo, hi, weight=None, tol=1e-10, max_rounds=48):
    """Integrate sum_i weight_i * int_{lo_i}^{hi_i} f, refining bad panels.

    Panels are bisected wherever the 7- and 15-point rules disagree, all
    pending panels evaluated in one vectorized call per round.  `tol` is
    an absolute tolerance on the total.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if weight is None:
        weight = np.ones_like(lo)
    else:
        weight = np.atleast_1d(np.asarray(weight, dtype=float))
    keep = hi > lo
    lo, hi, weight = lo[keep], hi[keep], weight[keep]
    if lo.size == 0:
        return 0.0

    total = 0.0
    for _ in range(max_rounds):
        coarse = _panel_sums(f, lo, hi, _GL_NODES, _GL_WEIGHTS)
        fine = _panel_sums(f, lo, hi, _GL_NODES_HI, _GL_WEIGHTS_HI)
        err = np.abs(weight * (fine - coarse))
        # local budget proportional to panel width, with a floor so that
        # many tiny panels cannot starve each other
        widths = hi - lo
        budget = tol * np.maximum(widths / widths.sum(), 1e-6)
        bad = err > budget
        total += float(np.sum(weight[~bad] * fine[~bad]))
        if not bad.any():
            return total
        mid = 0.5 * (lo[bad] + hi[bad])
        lo = np.concatenate([lo[bad], mid])
        hi = np.concatenate([mid, hi[bad]])
        weight = np.concatenate([weight[bad], weight[bad]])
    # refinement exhausted: accept the fine estimate for what is left
    total += float(np.sum(weight * _panel_sums(f, lo, hi, _GL_NODES_HI, _GL_WEIGHTS_HI)))
    return total


def adaptive_gauss(f, a, b, tol=1e-10, split_points=()):
    """Adaptive integral of vectorized f over [a, b]."""
    pts = [a] + sorted(p for p in split_points if a < p < b) + [b]
    pts = np.asarray(pts, dtype=float)
    return adaptive_panels(f, pts[:-1], pts[1:], tol=tol)


def integrate_against_measure(f, measure, tol=1e-10, split_points=()):
    """int f(t) dnu(t) for a piecewise-linear distribution nu.

    The density is constant on each node interval and enters as the
    panel weight, so node breakpoints are honored exactly.
    """
    t = measure.t
    lo, hi = t[:-1], t[1:]
    w = measure.density
    cuts = np.asarray([p for p in split_points if t[0] < p < t[-1]], dtype=float)
    if cuts.size:
        seg = np.searchsorted(t, cuts, side="right") - 1
        lo_list, hi_list, w_list = [], [], []
        for i in range(len(t) - 1):
            inner = np.sort(cuts[seg == i])
            edges = np.concatenate([[t[i]], inner, [t[i + 1]]])
            lo_list.append(edges[:-1])
            hi_list.append(edges[1:])
            w_list.append(np.full(edges.size - 1, w[i]))
        lo = np.concatenate(lo_list)
        hi = np.concatenate(hi_list)
        w = np.concatenate(w_list)
    return adaptive_panels(f, lo, hi, weight=w, tol=tol)


@dataclass(frozen=True)
class IntegralResult:
    """Value of an improper integral together with a divergence flag."""

    value: float
    divergent: bool
    tail: tuple = field(default=())

    def __float__(self):
        return float(self.value)


def endpoint_refined_integral(f, a, b, tol=1e-9, cap=1e6, max_levels=60):
    """Integrate f over (a, b) allowing blow-ups at both endpoints.

    Shrinking geometric collars [a + h, b - h] with h -> h/8; the collar
    strips are integrated adaptively and accumulated.  If the strip
    contributions stop decreasing, or the running total passes `cap`,
    the integral is reported divergent (value +inf), never raised.
    """
    width = b - a
    h = width / 8.0
    inner_tol = tol / 8.0
    total = adaptive_gauss(f, a + h, b - h, tol=inner_tol)
    prev_strip = None
    stall = 0
    # below the float resolution of the endpoints quadrature nodes round
    # onto them; a divergent integrand stalls or passes the cap well before
    # this depth, so reaching it means the collar is unresolvable, not
    # divergent
    h_floor = 1.0e-14 * max(abs(a), abs(b), width)
    for _ in range(max_levels):
        h_new = h / 8.0
        if h_new <= h_floor:
            return IntegralResult(total, False)
        strip = adaptive_gauss(f, a + h_new, a + h, tol=inner_tol) + adaptive_gauss(
            f, b - h, b - h_new, tol=inner_tol
        )
        total += strip
        if not np.isfinite(total) or abs(total) > cap:
            return IntegralResult(np.inf, True)
        if abs(strip) < 0.5 * tol:
            return IntegralResult(total, False)
        if prev_strip is not None and abs(strip) > 0.66 * abs(prev_strip):
            stall += 1
            if stall >= 6:
                return IntegralResult(np.inf, True)
        else:
            stall = 0
        prev_strip = strip
        h = h_new
    return IntegralResult(np.inf, True)
