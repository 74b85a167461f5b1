"""Random-equation families F(t; x) = f0(t) + sum_i x_i f_i(t).

A family is a set of coefficient functions f0..f_dim with analytic derivative
jets up to third order. Three kinds are provided: trigonometric polynomials,
Kac polynomials and custom families (polynomial tables or user jet functions).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from ._scan import scan_zeros
from .errors import DegenerateFamily, InvalidInput

XI_REL_THRESHOLD = 1e-14
DEFAULT_GRID = 1024


@dataclass(frozen=True)
class Trig:
    """f0 = d, f_{2k-1} = cos(kt), f_{2k} = sin(kt) for k = 1..n."""
    n: int
    d: float = 0.0


@dataclass(frozen=True)
class Kac:
    """f0 = d, f_i = t^(i-1) for i = 1..n."""
    n: int
    d: float = 0.0


@dataclass(frozen=True)
class Custom:
    label: str = "custom"


Kind = Union[Trig, Kac, Custom]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise InvalidInput(f"interval needs finite lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class Jet3:
    value: float
    d1: float
    d2: float
    d3: float


@dataclass(frozen=True, eq=False)
class BasisFamily:
    """Coefficient functions f0..f_dim of an equation linear in x.

    ``jet_fn(t)`` maps an array of parameters to an array of shape
    ``(4, dim + 1) + t.shape`` holding value and first three derivatives.
    ``poly`` is the ascending coefficient table ``(dim + 1, deg + 1)`` for
    polynomial families and ``None`` otherwise.
    """
    dim: int
    kind: Kind
    jet_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    poly: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidInput("dim must be >= 2")

    # -- evaluation ---------------------------------------------------------
    def jets(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.jet_fn(t)

    def jet(self, i: int, t: float) -> Jet3:
        if not 0 <= i <= self.dim:
            raise InvalidInput(f"basis index {i} outside 0..{self.dim}")
        j = self.jets(float(t))[:, i]
        return Jet3(*(float(c) for c in j))

    @property
    def is_polynomial(self) -> bool:
        return self.poly is not None

    @property
    def f0_is_zero(self) -> bool:
        if isinstance(self.kind, (Trig, Kac)):
            return self.kind.d == 0.0
        if self.poly is not None:
            return not np.any(self.poly[0])
        return False

    def coefficients(self, x) -> np.ndarray:
        """Ascending polynomial coefficients of t -> F(t; x) (polynomial families only)."""
        if self.poly is None:
            raise InvalidInput("family is not polynomial")
        x = _check_x(self, x)
        return self.poly[0] + x @ self.poly[1:]

    def to_spec(self) -> dict:
        k = self.kind
        if isinstance(k, Trig):
            return {"kind": "trig", "n": k.n, "d": k.d}
        if isinstance(k, Kac):
            return {"kind": "kac", "n": k.n, "d": k.d}
        if self.poly is not None:
            return {"kind": "custom", "table": self.poly.tolist()}
        raise InvalidInput("custom families with jet functions are not serializable")


# -- constructors -----------------------------------------------------------

def trig_family(n: int, d: float = 0.0) -> BasisFamily:
    if n < 1:
        raise InvalidInput("trig family needs n >= 1 harmonics")
    k = np.arange(1, n + 1, dtype=float)

    def jet_fn(t):
        out = np.empty((4, 2 * n + 1) + t.shape)
        out[0, 0] = d
        out[1:, 0] = 0.0
        kt = np.multiply.outer(k, t)
        kk = k.reshape((n,) + (1,) * t.ndim)
        c, s = np.cos(kt), np.sin(kt)
        out[0, 1::2], out[0, 2::2] = c, s
        out[1, 1::2], out[1, 2::2] = -kk * s, kk * c
        out[2, 1::2], out[2, 2::2] = -kk**2 * c, -kk**2 * s
        out[3, 1::2], out[3, 2::2] = kk**3 * s, -kk**3 * c
        return out

    return BasisFamily(dim=2 * n, kind=Trig(n, float(d)), jet_fn=jet_fn)


def polynomial_family(table, kind: Kind | None = None) -> BasisFamily:
    """Family whose f_i are polynomials; ``table[i]`` holds ascending coefficients of f_i."""
    try:
        rows = [np.atleast_1d(np.asarray(r, dtype=float)) for r in table]
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad coefficient table: {exc}") from exc
    if not rows or any(r.ndim != 1 or r.size == 0 for r in rows):
        raise InvalidInput("coefficient table rows must be non-empty 1-d sequences")
    width = max(r.size for r in rows)
    table = np.zeros((len(rows), width))
    for i, r in enumerate(rows):
        table[i, :r.size] = r  # shorter rows are zero-padded
    if table.shape[0] < 3:
        raise InvalidInput("table needs rows for f0 and at least two f_i")
    if not np.all(np.isfinite(table)):
        raise InvalidInput("non-finite polynomial coefficients")
    dim = table.shape[0] - 1
    derivs = [table]
    for _ in range(3):
        prev = derivs[-1]
        derivs.append(npoly.polyder(prev, axis=1) if prev.shape[1] > 1 else np.zeros_like(prev[:, :1]))
    coeff_t = [c.T.copy() for c in derivs]

    def jet_fn(t):
        return np.stack([npoly.polyval(t, c, tensor=True) for c in coeff_t])

    table.setflags(write=False)
    return BasisFamily(dim=dim, kind=kind or Custom("polynomial"), jet_fn=jet_fn, poly=table)


def kac_family(n: int, d: float = 0.0) -> BasisFamily:
    if n < 2:
        raise InvalidInput("Kac family needs n >= 2")
    table = np.zeros((n + 1, n))
    table[0, 0] = d
    table[1:, :] = np.eye(n)
    return polynomial_family(table, kind=Kac(n, float(d)))


def custom_family(dim: int, jet_fn, label: str = "custom") -> BasisFamily:
    """Wrap a user jet function returning shape ``(4, dim + 1) + t.shape``."""
    def checked(t):
        out = np.asarray(jet_fn(t), dtype=float)
        if out.shape != (4, dim + 1) + t.shape:
            raise InvalidInput(f"jet function returned shape {out.shape}")
        return out
    return BasisFamily(dim=dim, kind=Custom(label), jet_fn=checked)


def family_from_spec(spec: dict) -> BasisFamily:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput("family spec must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "trig":
            return trig_family(int(spec["n"]), float(spec.get("d", 0.0)))
        if kind == "kac":
            return kac_family(int(spec["n"]), float(spec.get("d", 0.0)))
        if kind == "custom":
            return polynomial_family(spec["table"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad family spec: {exc}") from exc
    raise InvalidInput(f"unknown family kind {kind!r}")


# -- operations -------------------------------------------------------------

def _check_x(family, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (family.dim,):
        raise InvalidInput(f"x has length {x.shape[-1:]} but family dim is {family.dim}")
    return x


def eval_F(family: BasisFamily, x, t):
    """f0(t) + sum x_i f_i(t)."""
    x = _check_x(family, x)
    j = family.jets(t)[0]
    return j[0] + np.tensordot(x, j[1:], axes=(0, 0))


def moments(family: BasisFamily, t):
    """Return (S, P, Q, D) with S = sum f_i^2, P = sum f_i f_i', Q = sum f_i'^2, D = SQ - P^2."""
    j = family.jets(t)
    return moments_from_jets(j)


def moments_from_jets(j):
    f, g = j[0, 1:], j[1, 1:]
    S = np.sum(f * f, axis=0)
    P = np.sum(f * g, axis=0)
    Q = np.sum(g * g, axis=0)
    if f.shape[0] <= 32:
        # Lagrange identity: SQ - P^2 = sum_{i<j} (f_i g_j - f_j g_i)^2, no cancellation
        w = f[:, None] * g[None, :] - g[:, None] * f[None, :]
        D = 0.5 * np.sum(w * w, axis=(0, 1))
    else:
        D = np.maximum(S * Q - P * P, 0.0)
    return S, P, Q, D


def wronskian(family: BasisFamily, i: int, j: int, t):
    if not (1 <= i <= family.dim and 1 <= j <= family.dim and i != j):
        raise InvalidInput(f"Wronskian indices ({i}, {j}) outside 1..{family.dim}")
    jt = family.jets(t)
    return jt[0, i] * jt[1, j] - jt[1, i] * jt[0, j]


def _wronskian_jets(jt, i, j):
    w = jt[0, i] * jt[1, j] - jt[1, i] * jt[0, j]
    dw = jt[0, i] * jt[2, j] - jt[2, i] * jt[0, j]
    return w, dw


@dataclass
class AssumptionReport:
    sum_squares_positive: bool
    wronskian12_ok: bool
    wronskian34_ok: bool
    f1_zero_count: int
    gamma_candidates: list[float]
    violations: list[tuple[float, str]]

    @property
    def ok(self) -> bool:
        return not self.violations


def xi_points(family: BasisFamily, interval: Interval, grid_points: int = DEFAULT_GRID):
    """Isolated t where all f_i (i >= 1) vanish. Raises DegenerateFamily on a plateau."""
    lo, hi = interval
    res = scan_zeros(lambda t: moments(family, t)[0], lo, hi, grid_points,
                     deriv=lambda t: 2.0 * moments(family, t)[1],
                     rel_band=XI_REL_THRESHOLD)
    if res.plateaus:
        raise DegenerateFamily(f"sum of squares vanishes on {res.plateaus}", t=res.plateaus[0][0])
    return res.zeros


def xi_correction(family: BasisFamily, interval: Interval, grid_points: int = DEFAULT_GRID) -> int:
    """Number of t in Xi where f0(t) = 0; every x has a zero there."""
    pts = xi_points(family, interval, grid_points)
    if not pts:
        return 0
    tt = np.linspace(interval.lo, interval.hi, grid_points)
    f0_scale = max(float(np.max(np.abs(family.jets(tt)[0, 0]))), np.finfo(float).tiny)
    f0 = family.jets(np.asarray(pts))[0, 0]
    return int(np.sum(np.abs(f0) <= 1e-10 * f0_scale))


def validate(family: BasisFamily, interval: Interval, grid_points: int = DEFAULT_GRID) -> AssumptionReport:
    """Grid check of the standing assumptions on ``interval``."""
    if grid_points < 2:
        raise InvalidInput("grid_points must be >= 2")
    lo, hi = interval
    violations: list[tuple[float, str]] = []

    S_scan = scan_zeros(lambda t: moments(family, t)[0], lo, hi, grid_points,
                        deriv=lambda t: 2.0 * moments(family, t)[1], rel_band=XI_REL_THRESHOLD)
    for a, _ in S_scan.plateaus:
        violations.append((a, "sum_squares_vanishes_on_interval"))
    for t0 in S_scan.zeros:
        violations.append((t0, "sum_squares_zero"))

    f1 = scan_zeros(lambda t: family.jets(t)[0, 1], lo, hi, grid_points,
                    deriv=lambda t: family.jets(t)[1, 1])
    for a, _ in f1.plateaus:
        violations.append((a, "f1_infinitely_many_zeros"))

    def w_scan(i, j):
        return scan_zeros(lambda t: _wronskian_jets(family.jets(t), i, j)[0], lo, hi, grid_points,
                          deriv=lambda t: _wronskian_jets(family.jets(t), i, j)[1])

    w12 = w_scan(1, 2) if family.dim >= 2 else None
    w12_ok = w12 is not None and not w12.zeros and not w12.plateaus
    for t0 in (w12.zeros if w12 else []):
        violations.append((t0, "wronskian12_singular"))
    for a, _ in (w12.plateaus if w12 else []):
        violations.append((a, "wronskian12_singular_on_interval"))

    w34_ok = True
    if family.dim >= 4:
        w34 = w_scan(3, 4)
        w34_ok = not w34.zeros and not w34.plateaus
        for t0 in w34.zeros:
            violations.append((t0, "wronskian34_singular"))
        for a, _ in w34.plateaus:
            violations.append((a, "wronskian34_singular_on_interval"))

    gamma: list[float] = []
    if family.dim == 2 and w12_ok:
        from .envelope import s2_values
        g = scan_zeros(lambda t: s2_values(family, t), lo, hi, grid_points)
        gamma = [t0 for t0 in g.zeros if lo < t0 < hi]

    violations = [(float(min(max(t0, lo), hi)), why) for t0, why in violations]
    violations.sort()
    return AssumptionReport(
        sum_squares_positive=not S_scan.zeros and not S_scan.plateaus,
        wronskian12_ok=w12_ok,
        wronskian34_ok=w34_ok,
        f1_zero_count=len(f1.zeros),
        gamma_candidates=gamma,
        violations=violations,
    )
