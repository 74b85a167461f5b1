"""Local expected-zero density H(t) for x uniform on a ball, plus closed forms.

At parameter t write S = sum f_i^2, P = sum f_i f_i', Q = sum f_i'^2 and
D = SQ - P^2. In an orthonormal frame adapted to (f, f') the zero set of
F(t; .) is the hyperplane x_1 = -a with a = f0/sqrt(S), and on it
dF/dt = alpha * x_2 - beta. Averaging |dF/dt| over the slice of the ball gives

    H(t) = (1/|B^n(0,r)|) * int_{-R}^{R} h(a, y) |alpha*y - beta| dy,
    R^2 = r^2 - a^2,  h(a, y) = pi^((n-2)/2) / Gamma(n/2) * (R^2 - y^2)^((n-2)/2),

which is zero when |a| >= r and reduces to sqrt(D)/(pi S) when f0 = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, gammaln

from .errors import DegenerateFamily, InvalidInput
from .family import BasisFamily, moments_from_jets

KAC_SINGULAR_BAND = 1e-3
_GL64 = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class HDensityPoint:
    t: float
    value: float
    case: str  # Interior | ChiLow | ChiHigh | Outside | F0Zero
    S: float
    P: float
    Q: float
    D: float
    a: float
    chi: float
    alpha: float
    beta: float
    experimental: bool = False

    @property
    def diag(self):
        return (self.S, self.P, self.Q, self.D, self.a, self.chi, self.alpha, self.beta)


# -- the one-dimensional kernel ---------------------------------------------

def _half_k(dim):
    return 0.5 * (dim - 2)


def _m0(k):
    """int_{-1}^{1} (1 - y^2)^k dy."""
    return math.exp(betaln(0.5, k + 1.0))


def _abs_moment(c, k):
    """G(c) = int_{-1}^{1} (1 - y^2)^k |y - c| dy, vectorized in c."""
    c = np.asarray(c, dtype=float)
    m0 = _m0(k)
    cc = np.clip(c, -1.0, 1.0)
    i0 = m0 * betainc(k + 1.0, k + 1.0, 0.5 * (cc + 1.0))
    i1 = -(1.0 - cc * cc) ** (k + 1.0) / (2.0 * (k + 1.0))
    inside = -2.0 * i1 - cc * m0 + 2.0 * cc * i0
    return np.where(np.abs(c) >= 1.0, np.abs(c) * m0, inside)


def wedge_inner_integral(a: float, chi: float, r: float, dim: int, method: str = "beta") -> float:
    """int_{-R}^{R} h(a, y) |y - chi| dy with R = sqrt(r^2 - a^2).

    ``method="beta"`` uses the closed form through the regularized incomplete
    beta function; ``method="gauss"`` substitutes y = R sin(theta) and applies
    64-point Gauss-Legendre on each side of chi.
    """
    if dim < 2:
        raise InvalidInput("dim must be >= 2")
    if not abs(a) < r:
        raise InvalidInput("need |a| < r")
    R = math.sqrt(r * r - a * a)
    k = _half_k(dim)
    cn = math.exp(k * math.log(math.pi) - gammaln(0.5 * dim))
    if method == "beta":
        return cn * R ** dim * float(_abs_moment(chi / R, k))
    if method != "gauss":
        raise InvalidInput(f"unknown method {method!r}")
    x, w = _GL64
    c = chi / R
    tc = math.asin(min(max(c, -1.0), 1.0))
    total = 0.0
    for lo, hi in ((-0.5 * math.pi, tc), (tc, 0.5 * math.pi)):
        if hi <= lo:
            continue
        th = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        f = np.cos(th) ** (2 * k + 1) * np.abs(np.sin(th) - c)
        total += 0.5 * (hi - lo) * float(w @ f)
    return cn * R ** dim * total


# -- H for the uniform ball ---------------------------------------------------

def _h_core(S, P, D, f0, f0p, r, dim):
    """Vectorized H from moments; arrays broadcast against each other and r."""
    S, P, D, f0, f0p, r = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (S, P, D, f0, f0p, r)))
    rs = np.sqrt(S)
    a = f0 / rs
    alpha = np.sqrt(D) / S
    beta = -(f0p * S - f0 * P) / (S * rs)
    R2 = r * r - a * a
    out = np.zeros(S.shape)
    ok = R2 > 0
    if np.any(ok):
        R = np.sqrt(R2[ok])
        k = _half_k(dim)
        al, be = alpha[ok], beta[ok]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(al > 0, be / (al * R), np.inf)
        g = np.where(np.abs(c) >= 1.0, np.abs(be) / R * _m0(k), al * _abs_moment(np.where(np.isfinite(c), c, 0.0), k))
        out[ok] = (0.5 * dim / math.pi) * (R / r[ok]) ** dim * g
    return out, a, alpha, beta, R2


def _check_S(S, t):
    bad = np.asarray(S) <= 0
    if np.any(bad):
        tb = np.asarray(t, dtype=float)
        tb = float(tb[bad][0]) if tb.ndim else float(tb)
        raise DegenerateFamily("sum of f_i^2 vanishes", t=tb)


def h_uniform_values(family: BasisFamily, r, t):
    """H(t) for x uniform on B(0, r); vectorized over t and/or r."""
    j = family.jets(t)
    S, P, _, D = moments_from_jets(j)
    _check_S(S, t)
    return _h_core(S, P, D, j[0, 0], j[1, 0], r, family.dim)[0]


def h_uniform_ball(family: BasisFamily, r: float, t: float) -> HDensityPoint:
    if not r > 0:
        raise InvalidInput("radius must be positive")
    j = family.jets(float(t))
    S, P, Q, D = (float(v) for v in moments_from_jets(j))
    _check_S(S, t)
    f0, f0p = float(j[0, 0]), float(j[1, 0])
    val, a, alpha, beta, R2 = _h_core(S, P, D, f0, f0p, r, family.dim)
    val, a, alpha, beta, R2 = float(val), float(a), float(alpha), float(beta), float(R2)
    if alpha > 0:
        chi = beta / alpha
    else:
        chi = math.copysign(math.inf, beta) if beta != 0 else math.nan
    if R2 <= 0:
        case = "Outside"
        val = 0.0
    elif f0 == 0.0 and f0p == 0.0:
        case = "F0Zero"
    elif chi < -math.sqrt(R2):
        case = "ChiLow"
    elif chi > math.sqrt(R2):
        case = "ChiHigh"
    else:
        case = "Interior"
    return HDensityPoint(float(t), val, case, S, P, Q, D, a, chi, alpha, beta,
                         experimental=family.dim in (2, 3))


# -- closed forms ---------------------------------------------------------------

def _kac_closed(n, t):
    t2 = t * t
    t2n = t2 ** n
    num = (t2n - 1.0) ** 2 - n * n * t2 ** (n - 1) * (t2 - 1.0) ** 2
    den = (t2 - 1.0) * (t2n - 1.0)
    return np.sqrt(np.maximum(num, 0.0)) / den / math.pi


def kac_density(n: int, t):
    """Zero density of the Kac polynomial sum_{i<n} x_i t^i with isotropic x."""
    if n < 2:
        raise InvalidInput("n must be >= 2")
    t = np.asarray(t, dtype=float)
    s = np.abs(t)
    eps = KAC_SINGULAR_BAND
    limit = math.sqrt((n * n - 1) / 12.0) / math.pi
    out = np.empty_like(s)
    lo = s <= 1.0 - eps
    hi = s >= 1.0 + eps
    mid = ~(lo | hi)
    out[lo] = _kac_closed(n, s[lo])
    # density(t) = density(1/t) / t^2 keeps the evaluation inside the unit interval
    out[hi] = _kac_closed(n, 1.0 / s[hi]) / s[hi] ** 2
    if np.any(mid):
        sm = s[mid]
        below = float(_kac_closed(n, np.asarray(1.0 - eps)))
        above = float(_kac_closed(n, np.asarray(1.0 / (1.0 + eps)))) / (1.0 + eps) ** 2
        edge = np.where(sm < 1.0, below, above)
        out[mid] = limit + (edge - limit) * np.abs(sm - 1.0) / eps
    return out if out.ndim else float(out)


def _trig_const(n):
    return 2.0 * math.sqrt((n + 1) * (2 * n + 1) / 6.0)


def trig_expectation_uniform(n: int, d: float, r: float) -> float:
    """Expected zeros on [0, 2pi] of d + sum_k (x_{2k-1} cos kt + x_{2k} sin kt), x uniform on B(0, r)."""
    if n < 1 or not r > 0:
        raise InvalidInput("need n >= 1 and r > 0")
    if not abs(d) / math.sqrt(n) < r:
        return 0.0
    return _trig_const(n) * ((r * r - d * d / n) / (r * r)) ** n


def trig_expectation_gaussian(n: int, d: float, sigma: float) -> float:
    """Same count with x isotropic Gaussian of per-coordinate variance sigma."""
    if n < 1 or not sigma > 0:
        raise InvalidInput("need n >= 1 and sigma > 0")
    return _trig_const(n) * math.exp(-d * d / (2.0 * sigma * n))
