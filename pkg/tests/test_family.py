import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rzero.errors import DegenerateFamily, InvalidInput
from rzero.family import (Interval, custom_family, eval_F, family_from_spec, kac_family,
                          moments, polynomial_family, trig_family, validate, wronskian,
                          xi_correction, xi_points)


def test_interval_rejects_bad_bounds():
    with pytest.raises(InvalidInput):
        Interval(1.0, 1.0)
    with pytest.raises(InvalidInput):
        Interval(0.0, math.inf)
    assert Interval(-1, 2).length == 3


@pytest.mark.parametrize("fam, x, t, expected", [
    (trig_family(1), (1, 0), 0.0, 1.0),
    (trig_family(1), (0, 1), math.pi / 2, 1.0),
    (kac_family(3), (1, -2, 1), 3.0, 4.0),
])
def test_eval_F_examples(fam, x, t, expected):
    assert eval_F(fam, x, t) == pytest.approx(expected, abs=1e-14)


def test_eval_F_dimension_mismatch():
    with pytest.raises(InvalidInput):
        eval_F(trig_family(2), [1, 2, 3], 0.0)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_trig_moments_constant(n):
    t = np.linspace(-7, 7, 1000)
    S, P, Q, D = moments(trig_family(n, d=0.7), t)
    q = sum(i * i for i in range(1, n + 1))
    assert np.max(np.abs(S - n)) <= 1e-12
    assert np.max(np.abs(P)) <= 1e-12
    assert np.allclose(Q, q, rtol=1e-12)
    assert np.allclose(D, n * q, rtol=1e-12)


@pytest.mark.parametrize("n, t", [(3, 0.4), (5, -0.8), (6, 1.7)])
def test_kac_sum_of_squares(n, t):
    S = moments(kac_family(n), t)[0]
    assert S == pytest.approx((1 - t ** (2 * n)) / (1 - t * t), rel=1e-13)


def test_kac2_moments_at_zero():
    assert tuple(float(v) for v in moments(kac_family(2), 0.0)) == (1.0, 0.0, 1.0, 1.0)


@pytest.mark.parametrize("fam, ij, expected", [
    (trig_family(1), (1, 2), 1.0),
    (kac_family(5), (1, 2), 1.0),
    (trig_family(2), (3, 4), 2.0),
])
def test_wronskian_examples(fam, ij, expected):
    t = np.linspace(-3, 3, 31)
    assert np.allclose(wronskian(fam, *ij, t), expected, atol=1e-13)


@given(st.floats(-5, 5), st.integers(1, 4), st.integers(1, 4))
def test_wronskian_antisymmetric(t, i, j):
    assume(i != j)
    fam = trig_family(2, 0.3)
    assert wronskian(fam, i, j, t) == pytest.approx(-wronskian(fam, j, i, t), abs=1e-13)


def test_wronskian_index_check():
    with pytest.raises(InvalidInput):
        wronskian(trig_family(1), 1, 3, 0.0)


@settings(max_examples=50)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4),
       st.lists(st.floats(-3, 3), min_size=4, max_size=4),
       st.floats(-4, 4))
def test_eval_F_affine(x, y, t):
    fam = trig_family(2, d=1.3)
    x, y = np.array(x), np.array(y)
    lhs = eval_F(fam, x + y, t) + eval_F(fam, 0 * x, t)
    rhs = eval_F(fam, x, t) + eval_F(fam, y, t)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=50)
@given(st.lists(st.lists(st.floats(-2, 2), min_size=3, max_size=3), min_size=4, max_size=4),
       st.floats(-2, 2))
def test_moment_discriminant_nonnegative(table, t):
    S, P, Q, D = moments(polynomial_family(table), t)
    assert D >= 0.0
    assert D <= S * Q + 1e-12


def test_jets_match_finite_differences():
    fam = kac_family(5, d=0.2)
    t, h = 0.6, 1e-5
    j = fam.jets(np.array([t - h, t, t + h]))
    for order in range(3):
        fd = (j[order, :, 2] - j[order, :, 0]) / (2 * h)
        assert np.allclose(fd, j[order + 1, :, 1], rtol=1e-8, atol=1e-8)


def test_validate_clean_families():
    rep = validate(trig_family(2), Interval(0, 2 * math.pi))
    assert rep.sum_squares_positive and rep.wronskian12_ok
    rep = validate(kac_family(4), Interval(-2, 2))
    assert rep.wronskian12_ok
    for t, _ in rep.violations:
        assert -2 <= t <= 2


def test_validate_flags_vanishing_f1():
    def jet_fn(t):
        out = np.zeros((4, 3) + t.shape)
        out[0, 0] = 1.0
        out[0, 1] = np.where(t > 0, t**4, 0.0)
        out[1, 1] = np.where(t > 0, 4 * t**3, 0.0)
        out[0, 2] = 1.0
        return out

    rep = validate(custom_family(2, jet_fn), Interval(-1, 1))
    assert not rep.ok
    assert any(tag.startswith("f1") for _, tag in rep.violations)


@pytest.mark.parametrize("f0, expected", [([0, 1], 1), ([1], 0)])
def test_xi_correction_examples(f0, expected):
    table = [f0 + [0] * (2 - len(f0)), [0, 1], [0, 1]]
    fam = polynomial_family(table)
    iv = Interval(-1, 1)
    assert xi_points(fam, iv) == pytest.approx([0.0], abs=1e-10)
    assert xi_correction(fam, iv) == expected


def test_xi_empty_for_trig():
    assert xi_correction(trig_family(2, d=1), Interval(0, 2 * math.pi)) == 0


def test_xi_plateau_is_degenerate():
    def jet_fn(t):
        out = np.zeros((4, 3) + t.shape)
        bump = np.where(np.abs(t) > 0.5, (np.abs(t) - 0.5) ** 4, 0.0)
        out[0, 1] = bump
        out[0, 2] = bump
        return out

    with pytest.raises(DegenerateFamily):
        xi_points(custom_family(2, jet_fn), Interval(-1, 1))


@pytest.mark.parametrize("spec", [
    {"kind": "trig", "n": 3, "d": 0.5},
    {"kind": "kac", "n": 4, "d": 0.0},
    {"kind": "custom", "table": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]},
])
def test_spec_round_trip(spec):
    fam = family_from_spec(spec)
    again = family_from_spec(fam.to_spec())
    t = np.linspace(-1, 1, 7)
    assert np.array_equal(fam.jets(t), again.jets(t))


@pytest.mark.parametrize("spec", [{"kind": "nope"}, {"n": 2}, {"kind": "trig"}, {"kind": "trig", "n": 0}])
def test_bad_specs(spec):
    with pytest.raises(InvalidInput):
        family_from_spec(spec)
