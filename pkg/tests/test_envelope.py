import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rzero.envelope import (classify, count_tangents, envelope_curve, envelope_point,
                            find_gamma, line_roots, split_at_gamma, tangent_slope)
from rzero.errors import GammaNonEmpty, InvalidInput, SingularWronskian, VerticalTangent
from rzero.family import Interval, kac_family, polynomial_family, trig_family

CIRCLE = trig_family(1, d=-1.0)   # -1 + x1 cos t + x2 sin t: tangent lines of the unit circle
CUBIC = polynomial_family([[0, 0, 0, 1], [1], [0, 1]])  # t^3 + x1 + t x2, inflection at 0
FULL = Interval(0.0, 2 * math.pi)


@pytest.mark.parametrize("t, xy", [(0.0, (1.0, 0.0)), (math.pi / 2, (0.0, 1.0))])
def test_circle_envelope_points(t, xy):
    e = envelope_point(CIRCLE, t)
    assert (e.x1, e.x2) == pytest.approx(xy, abs=1e-15)


@settings(max_examples=50)
@given(st.floats(-10, 10))
def test_circle_s2(t):
    assert envelope_point(CIRCLE, t).s2 == pytest.approx(-1.0, abs=1e-14)


def test_concurrent_lines_have_no_isolated_gamma():
    # every line of d + x1 + t x2 passes through (-d, 0): s2 vanishes identically
    from rzero.errors import DegenerateGamma
    with pytest.raises(DegenerateGamma):
        find_gamma(kac_family(2, 0.5), Interval(-2, 2))


def test_singular_wronskian():
    fam = polynomial_family([[1], [0, 1], [0, 0, 1]])  # W = t^2
    with pytest.raises(SingularWronskian):
        envelope_point(fam, 0.0)


def test_dim_check():
    with pytest.raises(InvalidInput):
        envelope_point(trig_family(2), 0.0)


def test_find_gamma_examples():
    assert find_gamma(CIRCLE, FULL) == []
    g = find_gamma(CUBIC, Interval(-1, 1))
    assert g == pytest.approx([0.0], abs=1e-12)
    assert find_gamma(CUBIC, Interval(0.2, 1.0)) == []


def test_split_at_gamma():
    parts = split_at_gamma(CUBIC, Interval(-1, 1))
    assert len(parts) == 2 and parts[0].hi == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("fam, t, expected", [
    (CIRCLE, math.pi / 4, -1.0),
    (CIRCLE, 0.0, 0.0),
    (kac_family(2), 0.7, -0.7),
    (kac_family(2), -2.0, 2.0),
])
def test_tangent_slope(fam, t, expected):
    assert tangent_slope(fam, t) == pytest.approx(expected, abs=1e-15)


def test_vertical_tangent():
    with pytest.raises(VerticalTangent):
        tangent_slope(polynomial_family([[1], [0, 1], [1]]), 0.0)


@pytest.mark.parametrize("point, expected", [((2.0, 0.0), 2), ((0.0, 0.0), 0), ((1.0, 0.0), 1)])
def test_count_tangents_circle(point, expected):
    assert count_tangents(CIRCLE, FULL, point) == expected


def test_line_roots_values():
    roots = line_roots(CIRCLE, FULL, (2.0, 0.0))
    assert roots == pytest.approx([math.pi / 3, 5 * math.pi / 3], abs=1e-10)


@pytest.mark.parametrize("fam, iv", [(CIRCLE, Interval(0.1, 1.2)), (CUBIC, Interval(-1, 1)),
                                     (kac_family(2, 0.5), Interval(-2, 2))])
def test_envelope_residuals(fam, iv):
    for t in np.linspace(iv.lo, iv.hi, 101):
        try:
            e = envelope_point(fam, t)
        except SingularWronskian:
            continue
        j = fam.jets(t)
        s0 = j[0, 0] + j[0, 1] * e.x1 + j[0, 2] * e.x2
        s1 = j[1, 0] + j[1, 1] * e.x1 + j[1, 2] * e.x2
        assert abs(s0) <= 1e-10 and abs(s1) <= 1e-10


def test_envelope_velocity_vanishes_at_gamma():
    for t in find_gamma(CUBIC, Interval(-1, 1)):
        e = envelope_point(CUBIC, t)
        assert abs(e.dx1) <= 1e-8 and abs(e.dx2) <= 1e-8


@settings(max_examples=50)
@given(st.floats(0.1, 1.4))
def test_tangent_line_identity(t):
    # the line through the envelope point with the tangent slope is the family line at t
    e = envelope_point(CIRCLE, t)
    m = tangent_slope(CIRCLE, t)
    # x1 - e.x1 = m (x2 - e.x2)  <=>  -(e.x1 - m e.x2) + x1 - m x2 = 0
    line = np.array([-(e.x1 - m * e.x2), 1.0, -m])
    coeffs = CIRCLE.jets(t)[0]
    scaled = line * coeffs[1]
    assert np.allclose(scaled, coeffs, atol=1e-10)


def test_envelope_derivative_matches_finite_difference():
    t, h = 0.4, 1e-6
    a, b, c = (envelope_point(CUBIC, s) for s in (t - h, t, t + h))
    assert b.dx1 == pytest.approx((c.x1 - a.x1) / (2 * h), rel=1e-7)
    assert b.dx2 == pytest.approx((c.x2 - a.x2) / (2 * h), rel=1e-7)


def test_classify_lens_point():
    iv = Interval(0.1, 1.2)
    # intersection of the two end tangents lies in the lens region
    A = np.array([[math.cos(0.1), math.sin(0.1)], [math.cos(1.2), math.sin(1.2)]])
    p = np.linalg.solve(A, [1.0, 1.0]) * 0.98 + 0.02 * np.array([math.cos(0.65), math.sin(0.65)])
    lab = classify(CIRCLE, iv, p)
    assert lab.region == "E4" and lab.count == 2 == count_tangents(CIRCLE, iv, p)


def test_classify_origin():
    lab = classify(CIRCLE, Interval(0.1, 1.2), (0.0, 0.0))
    assert lab.count == 0 and lab.region in ("E1", "E6")


def test_classify_on_arc():
    e = envelope_point(CIRCLE, 0.7)
    lab = classify(CIRCLE, Interval(0.1, 1.2), (e.x1, e.x2))
    assert (lab.count, lab.region) == (1, "E5")


def test_classify_requires_gamma_free():
    with pytest.raises(GammaNonEmpty):
        classify(CUBIC, Interval(-1, 1), (0.0, 0.0))


def test_classify_requires_nonvanishing_f1():
    with pytest.raises(VerticalTangent):
        classify(CIRCLE, Interval(1.0, 2.0), (0.0, 0.0))


@pytest.mark.parametrize("fam, iv", [
    (CIRCLE, Interval(0.1, 1.2)),
    (CIRCLE, Interval(-1.3, 1.4)),
    (CIRCLE, Interval(1.7, 4.5)),
    (CUBIC, Interval(0.2, 1.0)),
    (CUBIC, Interval(-1.0, -0.1)),
    (polynomial_family([[0, 0, 0, 1], [1], [0, 0, 1]]), Interval(0.3, 1.5)),
])
def test_classify_matches_count(fam, iv):
    pts = np.random.default_rng(11).uniform(-3, 3, (1500, 2))
    bad = [p for p in pts if classify(fam, iv, p).count != count_tangents(fam, iv, p)]
    assert not bad


def test_region_count_rules():
    rng = np.random.default_rng(12)
    iv = Interval(-1.3, 1.4)
    for p in rng.uniform(-3, 3, (500, 2)):
        lab = classify(CIRCLE, iv, p)
        if lab.region in ("E1", "E6"):
            assert lab.count == 0
        elif lab.region == "E4":
            assert lab.count == 2
        else:
            assert lab.count in (1, 2)


def test_envelope_curve_rows():
    rows = envelope_curve(CIRCLE, Interval(0.1, 1.2), num=11)
    assert len(rows) == 11
    for t, x1, x2, s2 in rows:
        assert x1 == pytest.approx(math.cos(t)) and x2 == pytest.approx(math.sin(t)) and s2 == pytest.approx(-1)
