"""Envelope geometry of the line family f0(t) + f1(t) x1 + f2(t) x2 = 0.

For two-parameter families each t gives a line in the (x1, x2) plane. The
envelope point solves F = dF/dt = 0; ``s2`` is d^2F/dt^2 evaluated on it and
its zeros (the inflection set) are where the envelope changes convexity.
On an inflection-free interval with f1 != 0 the envelope is the graph of a
strictly convex or concave x1 = H(x2), and the number of family lines through
a point is 0, 1 or 2 depending on which of six regions holds the point.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from ._scan import merge_clusters, scan_zeros
from .errors import (DegenerateGamma, GammaNonEmpty, InvalidInput,
                     SingularWronskian, VerticalTangent)
from .family import BasisFamily, Interval, Trig

GAMMA_GRID = 4096
WRONSKIAN_REL_TOL = 1e-13
BOUNDARY_BAND = 1e-9
CLUSTER_TOL = 1e-9


@dataclass(frozen=True)
class EnvelopePoint:
    t: float
    x1: float
    x2: float
    dx1: float
    dx2: float
    s2: float
    s3: float


@dataclass(frozen=True)
class RegionLabel:
    count: int
    region: str  # "E1" .. "E6"


def _require_dim2(family):
    if family.dim != 2:
        raise InvalidInput(f"envelope geometry needs a two-parameter family, got dim={family.dim}")


def _solve(j):
    """Envelope point and derivatives from jets of shape (4, 3, ...)."""
    f0, f1, f2 = j[:, 0], j[:, 1], j[:, 2]
    W = f1[0] * f2[1] - f1[1] * f2[0]
    x1 = -(f2[1] * f0[0] - f2[0] * f0[1]) / W
    x2 = -(-f1[1] * f0[0] + f1[0] * f0[1]) / W
    s2 = f0[2] + f1[2] * x1 + f2[2] * x2
    s3 = f0[3] + f1[3] * x1 + f2[3] * x2
    # differentiate F = 0 and F' = 0 along the envelope:
    # f1 x1' + f2 x2' = 0,  f1' x1' + f2' x2' = -s2
    dx1 = s2 * f2[0] / W
    dx2 = -s2 * f1[0] / W
    return W, x1, x2, dx1, dx2, s2, s3


def s2_values(family: BasisFamily, t):
    _require_dim2(family)
    return _solve(family.jets(t))[5]


def envelope_point(family: BasisFamily, t: float) -> EnvelopePoint:
    _require_dim2(family)
    j = family.jets(float(t))
    with np.errstate(divide="ignore", invalid="ignore"):
        W, x1, x2, dx1, dx2, s2, s3 = _solve(j)
    scale = max(np.max(np.abs(j[0, 1:])) * np.max(np.abs(j[1, 1:])), np.finfo(float).tiny)
    if abs(W) <= WRONSKIAN_REL_TOL * scale:
        raise SingularWronskian(float(t))
    return EnvelopePoint(float(t), float(x1), float(x2), float(dx1), float(dx2), float(s2), float(s3))


def find_gamma(family: BasisFamily, interval: Interval, grid_points: int = GAMMA_GRID) -> list[float]:
    """Isolated zeros of s2 in the open interval, ascending."""
    _require_dim2(family)
    lo, hi = interval
    tt = np.linspace(lo, hi, grid_points)
    W = _solve(family.jets(tt))[0]
    if np.any(np.sign(W[:-1]) * np.sign(W[1:]) <= 0):
        raise SingularWronskian(float(tt[np.argmin(np.abs(W))]))
    res = scan_zeros(lambda t: s2_values(family, t), lo, hi, grid_points, touching=False)
    if res.plateaus:
        raise DegenerateGamma(f"s2 vanishes on {res.plateaus}")
    return [t0 for t0 in res.zeros if lo < t0 < hi]


def tangent_slope(family: BasisFamily, t: float) -> float:
    """dx1/dx2 of the envelope: -f2/f1."""
    _require_dim2(family)
    j = family.jets(float(t))[0]
    if j[1] == 0.0:
        raise VerticalTangent(float(t))
    return float(-j[2] / j[1])


def _is_full_period(family, interval):
    if not isinstance(family.kind, Trig):
        return False
    periods = interval.length / (2 * np.pi)
    return periods >= 1 and abs(periods - round(periods)) <= 1e-12 * periods


def line_roots(family: BasisFamily, interval: Interval, point, grid_points=None, cluster_tol=CLUSTER_TOL):
    """Distinct t in the interval whose family line passes through ``point`` = (x1, x2)."""
    _require_dim2(family)
    x = np.asarray(point, dtype=float)
    lo, hi = interval
    if grid_points is None:
        grid_points = max(256, int(64 * family.dim * interval.length) + 1)

    def F(t):
        j = family.jets(t)[0]
        return j[0] + x[0] * j[1] + x[1] * j[2]

    def dF(t):
        j = family.jets(t)[1]
        return j[0] + x[0] * j[1] + x[1] * j[2]

    roots = scan_zeros(F, lo, hi, grid_points, deriv=dF, cluster_tol=cluster_tol).zeros
    if _is_full_period(family, interval) and len(roots) > 1:
        if roots[0] - lo <= cluster_tol and hi - roots[-1] <= cluster_tol:
            roots = roots[:-1]
    return roots


def count_tangents(family: BasisFamily, interval: Interval, point) -> int:
    return len(line_roots(family, interval, point))


class _Arc:
    """Inflection-free, f1-nonvanishing envelope arc over an interval."""

    def __init__(self, family, interval):
        self.family = family
        self.interval = interval
        lo, hi = interval
        tt = np.linspace(lo, hi, GAMMA_GRID)
        j = family.jets(tt)
        if np.any(np.sign(j[0, 1, :-1]) * np.sign(j[0, 1, 1:]) <= 0):
            raise VerticalTangent(float(tt[np.argmin(np.abs(j[0, 1]))]))
        gamma = find_gamma(family, interval)
        if gamma:
            raise GammaNonEmpty(gamma)
        mid = 0.5 * (lo + hi)
        jm = family.jets(mid)
        s2m = _solve(jm)[5]
        # x1 = H(x2) has H'' = W^2 / (f1^3 s2), so convex iff f1 * s2 > 0
        self.kappa = np.sign(jm[0, 1] * s2m)
        self.x2_lo = envelope_point(family, lo).x2
        self.x2_hi = envelope_point(family, hi).x2

    def side(self, t, p):
        """Signed offset of p from the tangent line at t, positive on the curve's side."""
        j = self.family.jets(t)[0]
        g = j[0] + j[1] * p[0] + j[2] * p[1]
        return self.kappa * g / j[1], np.hypot(1.0, j[2] / j[1])

    def hbar(self, x2):
        """Envelope extended linearly by the end tangents, as a function of x2."""
        lo, hi = self.interval
        a, b = sorted((self.x2_lo, self.x2_hi))
        if a <= x2 <= b:
            g = lambda t: envelope_point(self.family, t).x2 - x2
            ga, gb = g(lo), g(hi)
            if ga == 0.0:
                t0 = lo
            elif gb == 0.0:
                t0 = hi
            else:
                t0 = brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            return envelope_point(self.family, t0).x1, True
        t_end = lo if abs(x2 - self.x2_lo) < abs(x2 - self.x2_hi) else hi
        j = self.family.jets(t_end)[0]
        return -(j[0] + j[2] * x2) / j[1], False


@lru_cache(maxsize=64)
def _arc(family, interval):
    return _Arc(family, interval)


def classify(family: BasisFamily, interval: Interval, point) -> RegionLabel:
    """Region of ``point`` relative to the envelope arc and its two end tangents.

    Requires an inflection-free interval on which f1 does not vanish. Points in
    the open regions get their count from the geometry; points inside the
    boundary band take the count from direct root counting.
    """
    _require_dim2(family)
    arc = _arc(family, interval)
    p = np.asarray(point, dtype=float)
    lo, hi = interval

    e_lo, n_lo = arc.side(lo, p)
    e_hi, n_hi = arc.side(hi, p)
    h, on_arc_range = arc.hbar(p[1])
    vert = arc.kappa * (p[0] - h)
    band = BOUNDARY_BAND * max(1.0, abs(p[0]), abs(p[1]))
    tol_lo, tol_hi = band * n_lo, band * n_hi

    if abs(vert) <= band and on_arc_range:
        return RegionLabel(count_tangents(family, interval, p), "E5")
    if vert > band:
        return RegionLabel(0, "E6")
    if e_lo < -tol_lo and e_hi < -tol_hi:
        return RegionLabel(0, "E1")
    if e_lo > tol_lo and e_hi > tol_hi:
        return RegionLabel(2, "E4")
    if e_lo < -tol_lo and e_hi > tol_hi:
        return RegionLabel(1, "E2")
    if e_hi < -tol_hi and e_lo > tol_lo:
        return RegionLabel(1, "E3")
    # on an end tangent or vertical band edge: the two-sided count is not fixed by geometry
    region = "E2" if e_lo <= tol_lo else "E3"
    return RegionLabel(count_tangents(family, interval, p), region)


def envelope_curve(family: BasisFamily, interval: Interval, num: int = 201):
    """Rows (t, x1, x2, s2) on a uniform t-grid, skipping singular Wronskian points."""
    rows = []
    for t in np.linspace(interval.lo, interval.hi, num):
        try:
            e = envelope_point(family, t)
        except SingularWronskian:
            continue
        rows.append((e.t, e.x1, e.x2, e.s2))
    return rows


def split_at_gamma(family: BasisFamily, interval: Interval) -> list[Interval]:
    """Sub-intervals between consecutive inflection points."""
    cuts = [interval.lo, *find_gamma(family, interval), interval.hi]
    return [Interval(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


__all__ = [
    "EnvelopePoint", "RegionLabel", "envelope_point", "find_gamma", "tangent_slope",
    "count_tangents", "line_roots", "classify", "envelope_curve", "split_at_gamma",
    "s2_values", "merge_clusters",
]
