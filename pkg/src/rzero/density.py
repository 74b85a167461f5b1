"""Radial parameter densities: uniform ball, isotropic Gaussian, general radial.

A radial density rho(x) = profile(|x|) with profile(s) = int_s^inf phi(u) du is
a mixture of uniform balls: the ball radius t has weight |B^n(0, t)| phi(t).
``radial_reduce`` integrates a uniform-ball quantity against that weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.special import gammaln, ndtri

from .errors import InvalidDensity, InvalidInput
from .quadrature import integrate_adaptive

INVERSE_CDF_NODES = 4096


def ball_volume(dim: int, r: float = 1.0) -> float:
    """Lebesgue measure of the n-ball of radius r."""
    if dim < 1 or r <= 0:
        raise InvalidInput("ball_volume needs dim >= 1 and r > 0")
    return math.exp(0.5 * dim * math.log(math.pi) + dim * math.log(r) - gammaln(0.5 * dim + 1.0))


@dataclass(frozen=True)
class BallGeometry:
    dim: int
    radius: float
    volume: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "volume", ball_volume(self.dim, self.radius))


@dataclass(frozen=True)
class UniformBall:
    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidDensity("UniformBall radius must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        inside = np.sum(x * x, axis=-1) <= self.r**2
        return np.where(inside, 1.0 / ball_volume(n, self.r), 0.0)


@dataclass(frozen=True)
class IsotropicGaussian:
    """Per-coordinate variance ``sigma``: rho(x) = (2 pi sigma)^(-n/2) exp(-|x|^2 / (2 sigma))."""
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidDensity("Gaussian variance must be positive")

    def profile(self, s, dim):
        s = np.asarray(s, dtype=float)
        return np.exp(-s * s / (2 * self.sigma) - 0.5 * dim * math.log(2 * math.pi * self.sigma))

    def phi(self, t, dim):
        t = np.asarray(t, dtype=float)
        return t / self.sigma * self.profile(t, dim)

    def tail_radius(self, dim):
        return math.sqrt(self.sigma) * (math.sqrt(dim) + 12.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.profile(np.sqrt(np.sum(x * x, axis=-1)), x.shape[-1])


@dataclass(frozen=True, eq=False)
class RadialGeneral:
    """Radial density given by its profile and phi = -profile'.

    ``profile`` and ``phi`` map radius arrays to arrays. Mass beyond
    ``tail_radius`` is treated as zero.
    """
    profile_fn: Callable[[np.ndarray], np.ndarray]
    phi_fn: Callable[[np.ndarray], np.ndarray]
    tail: float

    def __post_init__(self):
        if not self.tail > 0:
            raise InvalidDensity("tail_radius must be positive")
        radii = np.linspace(0.0, self.tail, 17)[:-1]
        prof = np.asarray(self.profile_fn(radii), dtype=float)
        ref = float(np.max(np.abs(prof)))
        for s, p in zip(radii, prof):
            v, _ = integrate_adaptive(lambda u: np.asarray(self.phi_fn(u), dtype=float), s, self.tail,
                                      rel_tol=1e-10, abs_tol=1e-14 * max(ref, 1.0))
            if abs(v - p) > 1e-6 * max(abs(p), 1e-6 * ref):
                raise InvalidDensity(f"profile({s}) = {p} but integral of phi from {s} is {v}")

    def profile(self, s, dim=None):
        return np.asarray(self.profile_fn(np.asarray(s, dtype=float)), dtype=float)

    def phi(self, t, dim=None):
        return np.asarray(self.phi_fn(np.asarray(t, dtype=float)), dtype=float)

    def tail_radius(self, dim=None):
        return self.tail

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.profile(np.sqrt(np.sum(x * x, axis=-1)))


DensityModel = Union[UniformBall, IsotropicGaussian, RadialGeneral]


def density_from_spec(spec: dict) -> DensityModel:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput("density spec must be an object with a 'kind'")
    try:
        if spec["kind"] == "uniform-ball":
            return UniformBall(float(spec.get("r", 1.0)))
        if spec["kind"] == "gaussian":
            return IsotropicGaussian(float(spec.get("sigma", 1.0)))
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad density spec: {exc}") from exc
    raise InvalidInput(f"unknown density kind {spec['kind']!r}")


def density_to_spec(model: DensityModel) -> dict:
    if isinstance(model, UniformBall):
        return {"kind": "uniform-ball", "r": model.r}
    if isinstance(model, IsotropicGaussian):
        return {"kind": "gaussian", "sigma": model.sigma}
    raise InvalidInput("general radial densities are not serializable")


# -- sampling ---------------------------------------------------------------

def uniforms_needed(model: DensityModel, dim: int) -> int:
    """Number of U(0,1) draws consumed per sample."""
    if isinstance(model, UniformBall):
        return dim + 1
    if isinstance(model, IsotropicGaussian):
        return dim
    return dim + 2


def _ball_from_uniforms(u, dim, radius):
    z = ndtri(u[:, :dim])
    norm = np.sqrt(np.sum(z * z, axis=1, keepdims=True))
    rad = np.asarray(radius).reshape(-1, 1) * u[:, dim:dim + 1] ** (1.0 / dim)
    return z / norm * rad


def transform_uniforms(model: DensityModel, dim: int, u) -> np.ndarray:
    """Map an (N, uniforms_needed) array of U(0,1) draws to N samples of x."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    need = uniforms_needed(model, dim)
    if u.shape[1] != need:
        raise InvalidInput(f"need {need} uniforms per sample, got {u.shape[1]}")
    if isinstance(model, UniformBall):
        return _ball_from_uniforms(u, dim, model.r)
    if isinstance(model, IsotropicGaussian):
        return ndtri(u) * math.sqrt(model.sigma)
    ball_r = _radial_inverse_cdf(model, dim)(u[:, dim + 1])
    return _ball_from_uniforms(u, dim, ball_r)


def sample(model: DensityModel, dim: int, rng: np.random.Generator, size: int | None = None):
    """Draw x ~ model in R^dim using ``rng``; returns shape (dim,) or (size, dim)."""
    if dim < 2:
        raise InvalidInput("sampling needs dim >= 2")
    n = 1 if size is None else int(size)
    u = rng.random((n, uniforms_needed(model, dim)))
    u[u == 0.0] = np.finfo(float).tiny
    x = transform_uniforms(model, dim, u)
    return x[0] if size is None else x


_inverse_cdf_cache: dict = {}


def _radial_inverse_cdf(model: RadialGeneral, dim: int):
    key = (id(model), dim)
    if key in _inverse_cdf_cache:
        return _inverse_cdf_cache[key][1]
    t = np.linspace(0.0, model.tail, INVERSE_CDF_NODES)
    w = ball_volume(dim) * t**dim * model.phi(t)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidDensity("ball-radius weight must be finite and non-negative")
    cdf = cumulative_simpson(w, x=t, initial=0.0)
    cdf = np.maximum.accumulate(cdf)
    mass = cdf[-1]
    if not abs(mass - 1.0) <= 1e-3:
        raise InvalidDensity(f"radial weight integrates to {mass}, not 1")
    cdf /= mass

    def inv(u):
        return np.interp(u, cdf, t)

    _inverse_cdf_cache[key] = (model, inv)
    return inv


# -- radial reduction -------------------------------------------------------

def radial_reduce(inner, dim: int, model: DensityModel, lower: float = 0.0, breakpoints=(),
                  rel_tol: float = 1e-10, abs_tol: float = 1e-13) -> float:
    """|B^n(0,1)| * int_0^inf t^n phi(t) inner(t) dt for a vectorized ``inner``.

    ``inner(t)`` is a uniform-ball quantity for radius t (e.g. the expected zero
    count). ``lower`` may be set where ``inner`` is known to vanish below it.
    For a uniform-ball model the weight is a point mass at its radius.
    """
    if isinstance(model, UniformBall):
        return float(np.asarray(inner(np.asarray([model.r])))[0])
    tail = model.tail_radius(dim)
    if lower >= tail:
        return 0.0
    vol = ball_volume(dim)

    def integrand(t):
        return vol * t**dim * model.phi(t, dim) * np.asarray(inner(t), dtype=float)

    val, _ = integrate_adaptive(integrand, max(lower, 0.0), tail, rel_tol=rel_tol, abs_tol=abs_tol,
                                breakpoints=breakpoints, max_panels=20000)
    return val
