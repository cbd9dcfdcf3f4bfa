"""Built-in measure families used across the test suite and the CLI.

The circle families live on [0, 2*pi].  The three canonical densities
with integrable log (cosine, expsine, trig3) are bounded away from zero,
so their inverses have bounded slope and the dyadic defect drops below
1e-2 well within fourteen steps.  `szego_flat` vanishes exponentially at
the endpoints: its log is still integrable, but the defect decays only
like 1/k, so it is kept out of the canonical trio and serves as the
slow-membership example.
"""

from __future__ import annotations

import numpy as np

from .measures import InverseProfile, MajorantSpec, SegmentMeasure

TWO_PI = 2.0 * np.pi


def uniform_measure(a: float = 0.0, b: float = TWO_PI, nodes: int = 2) -> SegmentMeasure:
    t = np.linspace(a, b, nodes)
    return SegmentMeasure(t, (t - a) / (b - a))


def quadratic_measure(nodes: int = 600, t_min: float = 2e-2) -> SegmentMeasure:
    """nu(t) = t^2 on [0, 1]; the inverse is mu(s) = sqrt(s).

    Nodes are geometric down to `t_min` and then cut straight to zero,
    so the represented mu has bounded slope ~1/t_min near s = 0.
    """
    t = np.concatenate([[0.0], np.geomspace(t_min, 1.0, nodes - 1)])
    return SegmentMeasure(t, t * t)


def measure_from_density(density=None, log_density=None, a: float = 0.0,
                         b: float = TWO_PI, nodes=None) -> SegmentMeasure:
    """Distribution of a positive density by cumulative Gauss quadrature."""
    if (density is None) == (log_density is None):
        raise ValueError("provide exactly one of density, log_density")
    if log_density is not None:
        def density(t):  # noqa: F811 - deliberate shadowing
            return np.exp(log_density(t))
    if nodes is None:
        nodes = np.linspace(a, b, 1025)
    nodes = np.asarray(nodes, dtype=float)
    x, w = np.polynomial.legendre.leggauss(8)
    lo, hi = nodes[:-1], nodes[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    vals = density((mid[:, None] + half[:, None] * x[None, :]).ravel()).reshape(-1, x.size)
    inc = half * (vals @ w)
    raw = np.concatenate([[0.0], np.cumsum(inc)])
    if raw[-1] <= 0:
        raise ValueError("density integrates to zero")
    nu = raw / raw[-1]
    # a density vanishing fast near an endpoint stalls the cumulative sum at
    # float resolution; collapse stalled nodes and stretch back to the segment
    keep = np.concatenate([[True], np.diff(nu) > 0.0])
    lo, hi = nodes[0], nodes[-1]
    nodes, nu = nodes[keep], nu[keep]
    if nodes.size < 2:
        raise ValueError("density vanishes outside a negligible set")
    nodes[0], nodes[-1] = lo, hi
    nu[-1] = 1.0
    return SegmentMeasure(nodes, nu)


def szego_cosine(nodes: int = 1025) -> SegmentMeasure:
    """Density (2 + cos(theta)) / (4*pi); the distribution is closed form."""
    th = np.linspace(0.0, TWO_PI, nodes)
    return SegmentMeasure(th, (2.0 * th + np.sin(th)) / (4.0 * np.pi))


def szego_expsine(nodes: int = 1025) -> SegmentMeasure:
    """Density proportional to exp(sin(theta))."""
    return measure_from_density(lambda t: np.exp(np.sin(t)),
                                nodes=np.linspace(0.0, TWO_PI, nodes))


def szego_trig3(nodes: int = 1025) -> SegmentMeasure:
    """Density (1.25 + sin(3*theta)) / (2.5*pi); closed-form distribution."""
    th = np.linspace(0.0, TWO_PI, nodes)
    nu = (1.25 * th + (1.0 - np.cos(3.0 * th)) / 3.0) / (2.5 * np.pi)
    return SegmentMeasure(th, nu)


def szego_flat(nodes: int = 801) -> SegmentMeasure:
    """Density vanishing like exp(-1/sqrt(x)) at both endpoints of [0, 2*pi].

    log density = -(x^-1/2 + (1-x)^-1/2), x = theta/(2*pi): integrable
    log (so the distribution is in the Szego class) but unbounded inverse
    slope, hence very slow defect decay.
    """
    def log_rho(t):
        # (2pi - t)/2pi instead of 1 - x: exact near the right endpoint
        x = np.clip(t / TWO_PI, 1e-300, 1.0)
        y = np.clip((TWO_PI - t) / TWO_PI, 1e-300, 1.0)
        return -(x ** -0.5 + y ** -0.5)

    frac = np.concatenate([np.geomspace(2e-4, 0.5, (nodes - 1) // 2),
                           1.0 - np.geomspace(2e-4, 0.5, (nodes - 1) // 2)[::-1]])
    grid = np.concatenate([[0.0], TWO_PI * np.unique(frac), [TWO_PI]])
    return measure_from_density(log_density=log_rho, nodes=np.unique(grid))


def szego_flat_log_density() -> MajorantSpec:
    """The szego_flat density as a log-space function, for condition checks."""
    def log_rho(t):
        t = np.asarray(t, dtype=float)
        x = np.clip(t / TWO_PI, 1e-300, 1.0)
        y = np.clip((TWO_PI - t) / TWO_PI, 1e-300, 1.0)
        return -(x ** -0.5 + y ** -0.5)
    return MajorantSpec(0.0, TWO_PI, log_func=log_rho, name="flat density")


def nonmember_profile(scale: float = 1.0, s_min: float = 1e-60,
                      nodes: int = 301) -> InverseProfile:
    """Inverse mu(s) = scale / log(e/s), the classical non-member.

    The averaged increment at x = 0 integrates to scale * d/d log log,
    which diverges as delta -> 0; sampled geometrically down to `s_min`
    the dyadic defect stays above 2 for every delta >= 2^-20.
    """
    s = np.concatenate([[0.0], np.geomspace(s_min, 1.0, nodes - 1)])
    vals = np.empty_like(s)
    vals[0] = 0.0
    vals[1:] = scale / (1.0 - np.log(s[1:]))
    return InverseProfile(s, vals)


def nonmember_measure(scale: float = 1.0) -> SegmentMeasure:
    """Distribution whose inverse is the non-member profile."""
    return nonmember_profile(scale).transpose()


def builtin_szego_measures() -> dict:
    return {
        "cosine": szego_cosine(),
        "expsine": szego_expsine(),
        "trig3": szego_trig3(),
    }


def rescale_measure(measure: SegmentMeasure, a: float, b: float) -> SegmentMeasure:
    """Affine push-forward of a distribution onto [a, b]."""
    span = measure.b - measure.a
    t = a + (measure.t - measure.a) * (b - a) / span
    t[0], t[-1] = a, b
    return SegmentMeasure(t, measure.nu)


_BUILTIN_MEASURES = {
    "uniform": uniform_measure,
    "quadratic": quadratic_measure,
    "cosine": szego_cosine,
    "expsine": szego_expsine,
    "trig3": szego_trig3,
    "flat": szego_flat,
    "nonmember": nonmember_measure,
}


def resolve_measure(name: str, segment=None) -> SegmentMeasure:
    """Look up a built-in measure by name, optionally rescaled to `segment`."""
    if name not in _BUILTIN_MEASURES:
        raise KeyError(f"unknown built-in measure {name!r}; "
                       f"choices: {sorted(_BUILTIN_MEASURES)}")
    m = _BUILTIN_MEASURES[name]()
    if segment is not None:
        m = rescale_measure(m, *segment)
    return m
