import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rzero.density import (IsotropicGaussian, RadialGeneral, UniformBall, ball_volume,
                           density_from_spec, density_to_spec, radial_reduce, sample,
                           transform_uniforms, uniforms_needed)
from rzero.errors import InvalidDensity, InvalidInput
from rzero.zero_density import trig_expectation_gaussian, trig_expectation_uniform


@pytest.mark.parametrize("dim, expected", [(2, math.pi), (3, 4 * math.pi / 3), (4, math.pi**2 / 2)])
def test_ball_volume(dim, expected):
    assert ball_volume(dim, 1.0) == pytest.approx(expected, rel=1e-14)


@given(st.integers(3, 30), st.floats(0.1, 5))
def test_ball_volume_recurrence(dim, r):
    assert ball_volume(dim, r) == pytest.approx(ball_volume(dim - 2, r) * 2 * math.pi * r * r / dim, rel=1e-12)


def test_ball_volume_rejects():
    with pytest.raises(InvalidInput):
        ball_volume(0, 1.0)


def test_uniform_ball_second_moment():
    x = sample(UniformBall(1.0), 2, np.random.default_rng(0), 10**6)
    r2 = np.sum(x * x, axis=1)
    assert abs(r2.mean() - 0.5) <= 3 * r2.std() / math.sqrt(r2.size)


def test_gaussian_second_moment():
    x = sample(IsotropicGaussian(1.0), 4, np.random.default_rng(1), 10**6)
    r2 = np.sum(x * x, axis=1)
    assert abs(r2.mean() - 4.0) <= 3 * r2.std() / math.sqrt(r2.size)


def test_gaussian_variance_parameter():
    x = sample(IsotropicGaussian(0.25), 3, np.random.default_rng(2), 10**5)
    assert x.var(axis=0) == pytest.approx([0.25] * 3, rel=0.02)


def test_uniform_ball_support():
    x = sample(UniformBall(2.0), 3, np.random.default_rng(3), 10**4)
    assert np.all(np.linalg.norm(x, axis=1) <= 2.0)


def test_uniform_ball_radial_ks():
    n, dim, r = 10**5, 5, 1.5
    s = np.linalg.norm(sample(UniformBall(r), dim, np.random.default_rng(4), n), axis=1)
    stat = stats.kstest(s, lambda v: np.clip(v / r, 0, 1) ** dim).statistic
    assert stat < 1.63 / math.sqrt(n)


def test_transform_shape_check():
    with pytest.raises(InvalidInput):
        transform_uniforms(UniformBall(1.0), 3, np.full((2, 3), 0.5))
    assert uniforms_needed(IsotropicGaussian(1.0), 3) == 3


def test_invalid_models():
    with pytest.raises(InvalidDensity):
        UniformBall(0.0)
    with pytest.raises(InvalidDensity):
        IsotropicGaussian(-1.0)


@pytest.mark.parametrize("dim", range(2, 13))
def test_radial_reduce_normalization(dim):
    assert radial_reduce(lambda t: np.ones_like(t), dim, IsotropicGaussian(1.0)) == pytest.approx(1.0, abs=1e-8)


def test_radial_reduce_uniform_is_point_mass():
    assert radial_reduce(lambda t: t**2, 3, UniformBall(1.7)) == pytest.approx(1.7**2)


@pytest.mark.parametrize("n, d, sigma", [(2, 1.0, 1.0), (2, 0.0, 0.5), (3, 0.7, 2.0)])
def test_radial_reduce_trig(n, d, sigma):
    inner = lambda r: np.array([trig_expectation_uniform(n, d, float(v)) for v in np.atleast_1d(r)])
    v = radial_reduce(inner, 2 * n, IsotropicGaussian(sigma), lower=abs(d) / math.sqrt(n))
    assert v == pytest.approx(trig_expectation_gaussian(n, d, sigma), rel=1e-8)


def test_radial_reduce_trig_value():
    inner = lambda r: np.array([trig_expectation_uniform(2, 1.0, float(v)) for v in np.atleast_1d(r)])
    v = radial_reduce(inner, 4, IsotropicGaussian(1.0), lower=1 / math.sqrt(2))
    assert v == pytest.approx(2.4627843180283, rel=1e-10)


def _exp_profile(dim):
    # rho(x) = c exp(-|x|), phi = -rho'
    c = 1.0 / (ball_volume(dim) * math.gamma(dim + 1))
    return RadialGeneral(lambda s: c * np.exp(-s), lambda s: c * np.exp(-s), tail=60.0)


def test_radial_general_normalization_and_sampling():
    dim = 3
    model = _exp_profile(dim)
    assert radial_reduce(lambda t: np.ones_like(t), dim, model) == pytest.approx(1.0, abs=1e-8)
    x = sample(model, dim, np.random.default_rng(5), 10**5)
    r = np.linalg.norm(x, axis=1)
    # |x| ~ Gamma(dim, 1) for this density
    assert abs(r.mean() - dim) <= 4 * r.std() / math.sqrt(r.size)


def test_radial_general_rejects_inconsistent_phi():
    with pytest.raises(InvalidDensity):
        RadialGeneral(lambda s: np.exp(-s), lambda s: 2 * np.exp(-s), tail=50.0)


@pytest.mark.parametrize("spec", [{"kind": "uniform-ball", "r": 2.0}, {"kind": "gaussian", "sigma": 0.5}])
def test_density_spec_round_trip(spec):
    assert density_to_spec(density_from_spec(spec)) == spec


@pytest.mark.parametrize("spec", [{"kind": "cauchy"}, {"r": 1}, {"kind": "uniform-ball", "r": -1}, "x"])
def test_density_spec_errors(spec):
    with pytest.raises((InvalidInput, InvalidDensity)):
        density_from_spec(spec)


@settings(max_examples=20)
@given(st.integers(2, 6), st.floats(0.2, 3))
def test_uniform_pdf_integrates(dim, r):
    m = UniformBall(r)
    assert m.pdf(np.zeros(dim)) * ball_volume(dim, r) == pytest.approx(1.0)
    assert m.pdf(np.full(dim, r)) == 0.0
