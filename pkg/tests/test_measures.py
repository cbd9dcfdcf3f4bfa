"""Measure layer: defect tester against closed forms and a brute-force scan,
modulus/Dini reports, condition integrals, majorant bridges, file formats."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from starproj.families import (
    nonmember_measure,
    nonmember_profile,
    quadratic_measure,
    rescale_measure,
    resolve_measure,
    szego_cosine,
    szego_flat,
    szego_flat_log_density,
    uniform_measure,
)
from starproj.measures import (
    InvalidMeasureError,
    InverseProfile,
    MajorantSpec,
    SegmentMeasure,
    class_a_defect,
    condition_integral,
    defect_sequence,
    dini_modulus,
    inverse_distribution,
    measure_from_majorant,
    read_density_csv,
    read_measure_csv,
    write_density_csv,
    write_measure_csv,
)

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# independent oracle: dense scan of the averaged-increment integral


def brute_defect(measure, delta, nx=400, nt=2000):
    """sup_x int_0^delta (mu(x+t) - mu(x-t))/t dt by log-spaced trapezoids.

    Knows nothing about the exact piecewise-linear formulas; the integrand
    is bounded by twice the max slope, so the missing [0, t_min] piece is
    below t_min * 2 * max_slope.
    """
    prof = measure.inverse()
    xs = np.linspace(-delta, 1.0 + delta, nx)
    ts = np.geomspace(delta * 1e-8, delta, nt)
    vals = (prof(xs[:, None] + ts[None, :]) - prof(xs[:, None] - ts[None, :])) / ts[None, :]
    totals = np.trapezoid(vals, ts, axis=1) + vals[:, 0] * ts[0]
    return float(np.max(totals))


@pytest.mark.parametrize("measure_ctor", [szego_cosine, quadratic_measure])
def test_defect_matches_brute_scan(measure_ctor):
    m = measure_ctor()
    for delta in (0.25, 0.0625):
        exact = class_a_defect(m, delta)
        brute = brute_defect(m, delta)
        assert brute <= exact * 1.05 + 1e-3
        assert exact <= brute * 1.05 + 1e-3


def test_defect_uniform_closed_form():
    # slope of the inverse is b - a everywhere, so the integral is 2(b-a)t/t
    m = uniform_measure()
    for delta in (0.5, 0.25, 2.0 ** -10):
        assert class_a_defect(m, delta) == pytest.approx(2.0 * TWO_PI * delta, rel=1e-12)


def test_defect_sqrt_inverse():
    # nu = t^2 has inverse sqrt(s): the shift x = 0 gives exactly 2 sqrt(delta),
    # and the graded node cut near zero adds only a small excess
    m = quadratic_measure()
    for delta in (0.25, 0.0625):
        d = class_a_defect(m, delta)
        assert d >= 2.0 * np.sqrt(delta) - 1e-9
        assert d <= 2.0 * np.sqrt(delta) + 0.05


def test_defect_rejects_bad_delta():
    m = uniform_measure()
    for delta in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            class_a_defect(m, delta)


def test_defect_sequence_verdicts():
    assert defect_sequence(uniform_measure()).verdict == "in"
    assert defect_sequence(quadratic_measure()).verdict == "in"
    rep = defect_sequence(nonmember_measure())
    assert rep.verdict == "not-in"
    assert min(rep.defects) > 0.1


def test_defect_sequence_flat_is_slow():
    # integrable log but unbounded inverse slope: still falling at k = 14,
    # yet far above the membership cut, so neither verdict fires
    rep = defect_sequence(szego_flat())
    assert rep.verdict == "inconclusive"
    assert rep.defects[-1] > rep.tol
    arr = np.asarray(rep.defects)
    assert (np.diff(arr) < 0).all()


def test_defect_report_to_dict():
    rep = defect_sequence(uniform_measure(), k_max=3)
    d = rep.to_dict()
    assert d["verdict"] == rep.verdict
    assert d["tol"] == rep.tol
    assert len(d["deltas"]) == len(d["defects"]) == 3


# ---------------------------------------------------------------------------
# modulus of continuity and the Dini integral


def test_dini_uniform_exact():
    rep = dini_modulus(uniform_measure())
    assert rep.dini == pytest.approx(TWO_PI, rel=1e-12)
    assert rep.delta(0.25) == pytest.approx(TWO_PI * 0.25, rel=1e-12)


def test_dini_sqrt_inverse():
    # Delta(t) = sqrt(t), integral = 2; the node grading costs a little
    rep = dini_modulus(quadratic_measure())
    assert rep.dini == pytest.approx(2.0, abs=0.05)


def test_dini_rearrangement_invariants():
    for m in (szego_cosine(), quadratic_measure()):
        rep = dini_modulus(m)
        prof = m.inverse()
        assert (np.diff(rep.h_values) <= 0).all()
        # int_0^1 h = total increment of mu
        total = float(np.sum(rep.h_values * rep.h_lengths))
        assert total == pytest.approx(prof.b - prof.a, rel=1e-9)
        assert rep.h_integral(1.0) == pytest.approx(total, rel=1e-9)
        # h_integral is concave: the first tenth carries at least a tenth
        assert rep.h_integral(0.1) >= 0.1 * total - 1e-12


def test_dini_accepts_profile_or_measure():
    m = uniform_measure()
    assert dini_modulus(m).dini == dini_modulus(m.inverse()).dini


# ---------------------------------------------------------------------------
# condition integrals


def test_loglogplus_closed_form():
    # log+ log+ exp(1/t) = -log t on (0, 1): integral 1
    spec = MajorantSpec(0.0, 1.0, log_func=lambda t: 1.0 / t, name="exp(1/t)")
    res = condition_integral("loglogplus", spec)
    assert not res.divergent
    assert res.value == pytest.approx(1.0, abs=1e-8)


def test_logminus_identity_closed_form():
    # f(t) = t on [0, 1]: int -log t dt = 1, exact through the linear segments
    t = np.linspace(0.0, 1.0, 33)
    res = condition_integral("logminus", (t, t))
    assert not res.divergent
    assert res.value == pytest.approx(1.0, abs=1e-10)


def test_logminus_divergent_flagged():
    # f = exp(-1/t) vanishes too fast: int 1/t diverges
    spec = MajorantSpec(0.0, 1.0, log_func=lambda t: -1.0 / t, name="exp(-1/t)")
    res = condition_integral("logminus", spec)
    assert res.divergent
    assert res.value == np.inf


def test_logminus_zero_plateau_divergent():
    t = np.array([0.0, 0.4, 0.6, 1.0])
    v = np.array([0.0, 0.0, 0.5, 1.0])
    res = condition_integral("logminus", (t, v))
    assert res.divergent


def test_loglogplus_flat_density_is_zero():
    # the flat density never exceeds 1, so log+ log+ vanishes identically
    res = condition_integral("loglogplus", szego_flat_log_density())
    assert not res.divergent
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_logminus_flat_density_closed_form():
    # -log f = x^{-1/2} + (1-x)^{-1/2} with x = t/2pi: integral 8 pi
    res = condition_integral("logminus", szego_flat_log_density())
    assert not res.divergent
    # the endpoint collars truncate at float resolution, costing a few 1e-6
    assert res.value == pytest.approx(8.0 * np.pi, abs=1e-4)


def test_condition_integral_measure_path():
    # density of the uniform measure on [0, 2pi] is 1/2pi < 1 everywhere
    res = condition_integral("logminus", uniform_measure())
    assert res.value == pytest.approx(TWO_PI * np.log(TWO_PI), rel=1e-12)


def test_condition_integral_callable_needs_segment():
    with pytest.raises(ValueError):
        condition_integral("logminus", lambda t: t + 1.0)
    res = condition_integral("logminus", lambda t: t + 1.0, segment=(0.0, 1.0))
    assert res.value == 0.0


def test_condition_integral_rejects_unknown_kind():
    with pytest.raises(ValueError):
        condition_integral("logplus", uniform_measure())
    with pytest.raises(TypeError):
        condition_integral("logminus", object())


def test_majorant_spec_validation():
    with pytest.raises(ValueError):
        MajorantSpec(0.0, 1.0)
    with pytest.raises(ValueError):
        MajorantSpec(
            0.0, 1.0,
            log_samples=(np.array([0.0, 1.0]), np.array([0.0, np.inf])),
            log_func=lambda t: t,
        )
    with pytest.raises(InvalidMeasureError):
        MajorantSpec(0.0, 1.0, log_samples=(np.array([0.0, 1.0]), np.array([0.0, np.inf])))


# ---------------------------------------------------------------------------
# majorant-to-measure bridges


def test_majorant_bridge_subharmonic():
    # M = |t|^{-1/2}: damping weight sqrt(|t|), normalization 4/3
    spec = MajorantSpec(
        -1.0, 1.0,
        log_func=lambda t: -0.5 * np.log(np.maximum(np.abs(t), 1e-300)),
        name="inv-sqrt",
    )
    m, z = measure_from_majorant(spec, "subharmonic")
    assert z == pytest.approx(4.0 / 3.0, abs=1e-4)
    assert m.segment == (-1.0, 1.0)
    res = condition_integral("logminus", m)
    assert not res.divergent
    # -log(0.75 sqrt(|t|)) integrates to 1 + 2 log(4/3)
    assert res.value == pytest.approx(1.0 + 2.0 * np.log(4.0 / 3.0), abs=0.02)


def test_majorant_bridge_modulus_identity():
    # log M = 2 + t^2 > 1, so log- of the weight equals log+ log+ M exactly
    spec = MajorantSpec(-1.0, 1.0, log_func=lambda t: 2.0 + t * t, name="loggrowth")
    closed = 2.0 * (np.log(3.0) - 2.0 + 2.0 * np.sqrt(2.0) * np.arctan(1.0 / np.sqrt(2.0)))
    res = condition_integral("loglogplus", spec)
    assert res.value == pytest.approx(closed, abs=1e-8)

    m, z = measure_from_majorant(spec, "modulus")
    t = np.linspace(-1.0, 1.0, 4001)
    w = 1.0 / (2.0 + t * t)
    assert z == pytest.approx(np.trapezoid(w, t), abs=1e-4)
    res2 = condition_integral("logminus", (t, w))
    assert res2.value == pytest.approx(closed, abs=1e-6)


def test_majorant_bridge_rejects_unknown_scale():
    spec = MajorantSpec(0.0, 1.0, log_func=lambda t: 0.0 * t, name="one")
    with pytest.raises(ValueError):
        measure_from_majorant(spec, "huge")


# ---------------------------------------------------------------------------
# node validation and files


def test_measure_validation():
    with pytest.raises(InvalidMeasureError):
        SegmentMeasure(np.array([0.0, 1.0, 1.0]), np.array([0.0, 0.5, 1.0]))
    with pytest.raises(InvalidMeasureError):
        SegmentMeasure(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.6, 0.4]))
    with pytest.raises(InvalidMeasureError):
        SegmentMeasure(np.array([0.0, 1.0]), np.array([0.1, 1.0]))
    with pytest.raises(InvalidMeasureError):
        SegmentMeasure(np.array([0.0, np.nan]), np.array([0.0, 1.0]))
    with pytest.raises(InvalidMeasureError):
        InverseProfile(np.array([0.0, 0.5]), np.array([0.0, 1.0]))


def test_measure_is_frozen():
    m = uniform_measure()
    with pytest.raises(ValueError):
        m.t[0] = 3.0


def test_measure_csv_roundtrip(tmp_path):
    m = szego_cosine(65)
    path = tmp_path / "m.csv"
    write_measure_csv(path, m)
    back = read_measure_csv(path)
    assert np.array_equal(back.t, m.t)
    assert np.array_equal(back.nu, m.nu)


def test_density_csv_roundtrip(tmp_path):
    t = np.linspace(0.0, 1.0, 9)
    g = np.cos(t) + 1.0
    path = tmp_path / "d.csv"
    write_density_csv(path, t, g)
    t2, g2 = read_density_csv(path)
    assert np.array_equal(t2, t)
    assert np.array_equal(g2, g)


@pytest.mark.parametrize(
    "content",
    [
        "",
        "x,y\n0,0\n1,1\n",
        "t,nu\n0,0\n",
        "t,nu\n0,0\nbad,1\n",
        "t,nu\n0,0\n1\n",
        "t,nu\n0,0\n0,1\n",
        "t,nu\n0,nan\n1,1\n",
    ],
)
def test_measure_csv_rejects_malformed(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(InvalidMeasureError) as err:
        read_measure_csv(path)
    assert "bad.csv" in str(err.value)


def test_density_csv_rejects_negative(tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("t,density\n0,1\n1,-0.5\n")
    with pytest.raises(InvalidMeasureError):
        read_density_csv(path)


def test_resolve_measure_names():
    for name in ("uniform", "quadratic", "cosine", "expsine", "trig3", "flat", "nonmember"):
        m = resolve_measure(name)
        assert isinstance(m, SegmentMeasure)
    with pytest.raises(KeyError):
        resolve_measure("bogus")
    m = resolve_measure("cosine", segment=(0.0, np.pi))
    assert m.segment == (0.0, np.pi)


def test_rescale_exact_endpoints():
    m = rescale_measure(szego_cosine(33), -1.0, 1.0)
    assert m.a == -1.0 and m.b == 1.0
    assert np.array_equal(m.nu, szego_cosine(33).nu)


def test_nonmember_profile_shape():
    prof = nonmember_profile()
    assert prof(0.0) == 0.0
    assert prof(1.0) == pytest.approx(1.0)
    # steep near s = 0: half the rise happens below s = e * exp(-2)
    # (the node sampling is geometric, so interior points interpolate)
    assert prof(np.exp(1 - 2.0)) == pytest.approx(0.5, abs=1e-3)


# ---------------------------------------------------------------------------
# property-based invariants


@st.composite
def segment_measures(draw):
    n = draw(st.integers(2, 8))
    dt = draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n))
    dv = draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n))
    t = np.concatenate([[0.0], np.cumsum(dt)])
    v = np.concatenate([[0.0], np.cumsum(dv)])
    return SegmentMeasure(t, v / v[-1])


@given(segment_measures())
def test_inverse_is_involution(m):
    back = inverse_distribution(m).transpose()
    assert np.array_equal(back.t, m.t)
    assert np.array_equal(back.nu, m.nu)


@given(segment_measures(), st.sampled_from([0.25, 0.0625]))
def test_defect_bounded_by_slope(m, delta):
    d = class_a_defect(m, delta, refine_tol=0.05)
    assert d <= 2.0 * m.inverse().max_slope * delta * (1.0 + 1e-9)
    assert d >= 0.0


@given(segment_measures())
def test_defect_monotone_in_delta(m):
    d_small = class_a_defect(m, 0.125, refine_tol=0.02)
    d_large = class_a_defect(m, 0.25, refine_tol=0.02)
    assert d_small <= d_large * 1.05 + 1e-9


@given(st.floats(-3.0, 3.0), st.floats(0.1, 5.0), st.sampled_from([0.5, 0.125]))
def test_defect_uniform_any_segment(a, width, delta):
    m = uniform_measure(a, a + width)
    assert class_a_defect(m, delta) == pytest.approx(2.0 * width * delta, rel=1e-9)


@given(segment_measures())
def test_defect_scales_with_rescale(m):
    delta = 0.25
    base = class_a_defect(m, delta, refine_tol=0.02)
    unit = class_a_defect(rescale_measure(m, 0.0, 1.0), delta, refine_tol=0.02)
    assert unit * (m.b - m.a) == pytest.approx(base, rel=1e-6, abs=1e-12)
