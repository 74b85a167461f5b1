"""Grid scan + bracketing refinement for zeros of a smooth scalar function.

Used by family validation, the envelope module and grid-based root counting.
All callables take and return numpy arrays (vectorized over t).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar


@dataclass
class ScanResult:
    zeros: list[float] = field(default_factory=list)
    plateaus: list[tuple[float, float]] = field(default_factory=list)
    scale: float = 0.0


def _brent(fun, a, b, xtol):
    return brentq(lambda s: float(fun(np.asarray(s))), a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)


def merge_clusters(roots, tol):
    """Collapse sorted roots closer than ``tol`` into one (keeps the first)."""
    out: list[float] = []
    for r in sorted(roots):
        if out and r - out[-1] <= tol:
            continue
        out.append(float(r))
    return out


def scan_zeros(fun, lo, hi, grid_points, *, deriv=None, rel_band=1e-14,
               xtol=1e-12, cluster_tol=1e-12, touching=True):
    """Locate the distinct zeros of ``fun`` on [lo, hi].

    Sign changes between grid nodes are refined with Brent's method. Cells where
    ``fun`` dips toward zero without a sign change at the nodes are refined at the
    extremum (zero of ``deriv`` if given, else bounded minimisation of |fun|): a
    sign flip there yields two roots, a value inside the band yields one touching
    root. Runs of three or more grid values inside the band are reported as
    plateaus instead of zeros.
    """
    t = np.linspace(lo, hi, int(grid_points))
    v = np.asarray(fun(t), dtype=float)
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    res = ScanResult(scale=scale)
    if scale == 0.0:
        res.plateaus.append((float(lo), float(hi)))
        return res
    band = rel_band * scale
    small = np.abs(v) <= band

    # plateaus: runs of >= 3 small values
    in_plateau = np.zeros_like(small)
    k = 0
    n = len(v)
    while k < n:
        if small[k]:
            j = k
            while j + 1 < n and small[j + 1]:
                j += 1
            if j - k + 1 >= 3:
                res.plateaus.append((float(t[k]), float(t[j])))
                in_plateau[k:j + 1] = True
            k = j + 1
        else:
            k += 1

    roots: list[float] = []
    for k in np.flatnonzero(small & ~in_plateau):
        roots.append(float(t[k]))

    s = np.sign(v)
    s[small] = 0.0
    cross = np.flatnonzero(s[:-1] * s[1:] < 0)
    for k in cross:
        roots.append(_brent(fun, t[k], t[k + 1], xtol))

    if touching:
        roots.extend(_dip_roots(fun, deriv, t, v, s, band, xtol))

    res.zeros = merge_clusters(roots, cluster_tol)
    return res


def _dip_roots(fun, deriv, t, v, s, band, xtol):
    out: list[float] = []
    same = (s[:-1] * s[1:]) > 0
    if deriv is not None:
        d = np.asarray(deriv(t), dtype=float)
        # |fun| decreasing at the left node and increasing at the right node
        cand = np.flatnonzero(same & (s[:-1] * d[:-1] < 0) & (s[1:] * d[1:] > 0))
        for k in cand:
            a, b = t[k], t[k + 1]
            te = _brent(deriv, a, b, xtol)
            out.extend(_resolve_dip(fun, a, b, te, s[k], band, xtol))
    else:
        a_ = np.abs(v)
        cand = np.flatnonzero(
            (s[1:-1] != 0) & (s[:-2] == s[1:-1]) & (s[2:] == s[1:-1])
            & (a_[1:-1] <= a_[:-2]) & (a_[1:-1] <= a_[2:])
        ) + 1
        for k in cand:
            a, b = t[k - 1], t[k + 1]
            sg = s[k]
            m = minimize_scalar(lambda x: sg * float(fun(np.asarray(x))), bounds=(a, b),
                                method="bounded", options={"xatol": xtol})
            out.extend(_resolve_dip(fun, a, b, float(m.x), sg, band, xtol))
    return out


def _resolve_dip(fun, a, b, te, sign_nodes, band, xtol):
    fe = float(fun(np.asarray(te)))
    if abs(fe) <= band:
        return [te]
    if np.sign(fe) == -sign_nodes:
        return [_brent(fun, a, te, xtol), _brent(fun, te, b, xtol)]
    return []
