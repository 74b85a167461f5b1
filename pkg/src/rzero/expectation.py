"""Expected zero count E = #(Xi zeros of f0) + integral of H(t) over the interval.

Isolated bad points (zeros of f1, singular Wronskians, inflection points,
support edges, the Kac singularity) split the interval. Each bad point gets an
excluded neighbourhood that is halved until the mass it could carry, bounded
by the sup of H on the adjacent panels times its width, is negligible against
the requested tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._scan import merge_clusters, scan_zeros
from .density import IsotropicGaussian, RadialGeneral, UniformBall, radial_reduce
from .errors import DegenerateFamily, DegenerateGamma, InvalidInput
from .family import (DEFAULT_GRID, BasisFamily, Interval, Kac, _wronskian_jets,
                     moments_from_jets, xi_correction)
from .quadrature import integrate_adaptive
from .zero_density import _check_S, _h_core, h_uniform_values

DEFAULT_REL_TOL = 1e-8
MAX_HALVINGS = 40
BAD_POINT_CLUSTER = 1e-12

REASONS = ("F1Zero", "WronskianSingular", "GammaPoint", "SupportEdge", "KacSingularity")


@dataclass(frozen=True)
class BadPoint:
    t: float
    reason: str


@dataclass
class ExpectationResult:
    value: float
    abs_error_estimate: float
    bad_points: list[BadPoint] = field(default_factory=list)
    xi_count: int = 0
    subintervals: int = 1
    integral: float = 0.0
    excluded_width: float = 0.0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "abs_error_estimate": self.abs_error_estimate,
            "xi_count": self.xi_count,
            "subintervals": self.subintervals,
            "bad_points": [{"t": b.t, "reason": b.reason} for b in self.bad_points],
        }


def _zeros(fun, deriv, lo, hi, grid_points, what, fatal=True):
    res = scan_zeros(fun, lo, hi, grid_points, deriv=deriv)
    if res.plateaus and fatal:
        raise DegenerateFamily(f"{what} vanishes on {res.plateaus}", t=res.plateaus[0][0])
    return res.zeros


def find_bad_points(family: BasisFamily, interval: Interval, grid_points: int = DEFAULT_GRID,
                    r: float | None = None) -> list[BadPoint]:
    """Parameters where the pointwise density formula or its derivation breaks down.

    ``r`` adds the uniform-ball support edges f0^2 = r^2 S.
    """
    if grid_points < 64:
        raise InvalidInput("grid_points must be >= 64")
    lo, hi = interval
    jets = family.jets
    out: list[BadPoint] = []

    for t0 in _zeros(lambda t: jets(t)[0, 1], lambda t: jets(t)[1, 1], lo, hi, grid_points, "f1"):
        out.append(BadPoint(t0, "F1Zero"))
    pairs = [(1, 2)] + ([(3, 4)] if family.dim >= 4 else [])
    for i, j in pairs:
        zs = _zeros(lambda t: _wronskian_jets(jets(t), i, j)[0],
                    lambda t: _wronskian_jets(jets(t), i, j)[1], lo, hi, grid_points, f"W(f{i}, f{j})")
        out.extend(BadPoint(t0, "WronskianSingular") for t0 in zs)
    if family.dim == 2 and not any(b.reason == "WronskianSingular" for b in out):
        from .envelope import find_gamma
        try:
            out.extend(BadPoint(t0, "GammaPoint") for t0 in find_gamma(family, interval))
        except DegenerateGamma:
            pass  # all lines share one envelope point; H itself is unaffected
    if r is not None:
        def edge(t):
            j = jets(t)
            return j[0, 0] ** 2 - r * r * np.sum(j[0, 1:] ** 2, axis=0)

        def dedge(t):
            j = jets(t)
            return 2 * j[0, 0] * j[1, 0] - 2 * r * r * np.sum(j[0, 1:] * j[1, 1:], axis=0)

        # an identically vanishing edge only means H = 0 on that stretch
        for t0 in _zeros(edge, dedge, lo, hi, grid_points, "support edge", fatal=False):
            out.append(BadPoint(t0, "SupportEdge"))
    if isinstance(family.kind, Kac):
        out.extend(BadPoint(s, "KacSingularity") for s in (-1.0, 1.0) if lo <= s <= hi)
    out.sort(key=lambda b: (b.t, REASONS.index(b.reason)))
    return out


def h_function(family: BasisFamily, model, rel_tol: float = 1e-10):
    """Vectorized t -> H(t) for the given density model."""
    if isinstance(model, UniformBall):
        return lambda t: h_uniform_values(family, model.r, t)
    if not isinstance(model, (IsotropicGaussian, RadialGeneral)):
        raise InvalidInput(f"unsupported density model {model!r}")
    dim = family.dim

    def H(t):
        t = np.asarray(t, dtype=float)
        j = family.jets(t)
        S, P, _, D = moments_from_jets(j)
        _check_S(S, t)
        f0, f0p = j[0, 0], j[1, 0]
        out = np.empty(t.shape)
        for idx in np.ndindex(t.shape):
            args = (S[idx], P[idx], D[idx], f0[idx], f0p[idx])
            a = abs(args[3]) / math.sqrt(args[0])
            out[idx] = radial_reduce(lambda r: _h_core(*args, r, dim)[0], dim, model,
                                     lower=a, rel_tol=rel_tol, abs_tol=1e-15)
        return out

    return H


def _pieces(lo, hi, cuts, w):
    """Sub-intervals between cuts, each trimmed by w next to every cut."""
    edges = [lo, *cuts, hi]
    is_cut = [lo in cuts, *([True] * len(cuts)), hi in cuts]
    pieces = []
    for k in range(len(edges) - 1):
        a, b = edges[k], edges[k + 1]
        if b <= a:
            continue
        a2 = a + w if is_cut[k] else a
        b2 = b - w if is_cut[k + 1] else b
        if b2 > a2:
            pieces.append((a2, b2, is_cut[k], is_cut[k + 1]))
    return pieces


def _integrate_pieces(H, pieces, rel_tol):
    total = err = 0.0
    sups = []
    for a, b, cut_a, cut_b in pieces:
        v, e, panels = integrate_adaptive(H, a, b, rel_tol=rel_tol, abs_tol=1e-15 * (b - a),
                                          return_panels=True)
        total += v
        err += e
        if cut_a:
            sups.append(panels[0][4])
        if cut_b:
            sups.append(panels[-1][4])
    return total, err, sups


def expected_zeros(family: BasisFamily, model, interval: Interval, rel_tol: float = DEFAULT_REL_TOL,
                   grid_points: int = DEFAULT_GRID) -> ExpectationResult:
    """Expected number of distinct zeros of F(.; x) in ``interval`` for x ~ model."""
    if not 1e-12 <= rel_tol <= 1e-2:
        raise InvalidInput("rel_tol must lie in [1e-12, 1e-2]")
    lo, hi = interval
    r = model.r if isinstance(model, UniformBall) else None
    bad = find_bad_points(family, interval, grid_points, r=r)
    xi = xi_correction(family, interval, grid_points)
    H = h_function(family, model, rel_tol=min(1e-10, 0.01 * rel_tol))
    cuts = merge_clusters([b.t for b in bad], BAD_POINT_CLUSTER)

    quad_tol = 0.5 * rel_tol
    w = 1e-6 * interval.length
    halvings = 0
    while True:
        pieces = _pieces(lo, hi, cuts, w)
        integral, err, sups = _integrate_pieces(H, pieces, quad_tol)
        excluded = interval.length - sum(b - a for a, b, _, _ in pieces)
        bound = max(sups, default=0.0) * excluded
        target = 0.1 * rel_tol * max(abs(integral) + xi, 1e-300)
        if bound <= target or halvings >= MAX_HALVINGS or not cuts:
            break
        step = max(1, min(MAX_HALVINGS - halvings, math.ceil(math.log2(bound / target))))
        w /= 2.0**step
        halvings += step

    return ExpectationResult(
        value=float(xi + integral),
        abs_error_estimate=float(err + bound),
        bad_points=bad,
        xi_count=xi,
        subintervals=len(pieces),
        integral=float(integral),
        excluded_width=float(excluded),
    )


def integrate_density(H, interval: Interval, rel_tol=1e-10, abs_tol=0.0, breakpoints=()):
    """Thin wrapper so callers can integrate a custom density over an interval."""
    return integrate_adaptive(H, interval.lo, interval.hi, rel_tol=rel_tol, abs_tol=abs_tol,
                              breakpoints=breakpoints)
