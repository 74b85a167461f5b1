"""Monte Carlo ground truth: sample x, count the real zeros of F(.; x), average.

Uniform draws come from a counter-based generator (Philox keyed by the seed).
Sample i always consumes the same fixed block of counters, so any split of the
samples into chunks or threads reproduces the same numbers bit for bit.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npoly

from ._scan import merge_clusters
from .density import transform_uniforms, uniforms_needed
from .errors import DegenerateSample, InvalidInput
from .family import BasisFamily, Interval, _check_x

CHUNK = 1024
DEGENERATE = -1  # histogram key for identically-zero samples
STURM_DROP = 1e-13
METHODS = {"sturm": "sturm", "companion": "companion", "grid": "grid", "gridbisect": "grid"}


@dataclass(frozen=True)
class RootCountConfig:
    method: str = "grid"
    grid: int = 16
    cluster_tol: float = 1e-9
    poly_eps: float = 1e-7

    def __post_init__(self):
        m = METHODS.get(str(self.method).lower())
        if m is None:
            raise InvalidInput(f"unknown root counting method {self.method!r}")
        object.__setattr__(self, "method", m)
        if self.grid < 16:
            raise InvalidInput("grid must be >= 16")
        if not self.cluster_tol > 0:
            raise InvalidInput("cluster_tol must be positive")


@dataclass
class MCEstimate:
    mean: float
    std_error: float
    samples: int
    histogram: dict = field(default_factory=dict)
    seed: int = 0
    degenerate: int = 0

    def tail(self, i: int) -> float:
        """Fraction of samples with at least i zeros."""
        return sum(f for c, f in self.histogram.items() if c >= i) / self.samples

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "samples": self.samples,
                "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
                "seed": self.seed, "degenerate": self.degenerate}


# -- counter-based uniforms ---------------------------------------------------

def _blocks_per_sample(words: int) -> int:
    return -(-words // 4)  # Philox4x64 emits 4 words per counter step


def counter_uniforms(seed: int, start: int, count: int, words: int) -> np.ndarray:
    """Uniforms in (0, 1) for samples start..start+count-1, shape (count, words)."""
    if seed < 0:
        raise InvalidInput("seed must be non-negative")
    bps = _blocks_per_sample(words)
    bg = np.random.Philox(key=int(seed), counter=int(start) * bps)
    raw = bg.random_raw(count * bps * 4).reshape(count, bps * 4)[:, :words]
    # 53-bit mantissa, shifted off zero so inverse-CDF transforms stay finite
    return ((raw >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53


def draw_samples(model, dim: int, seed: int, start: int, count: int) -> np.ndarray:
    u = counter_uniforms(seed, start, count, uniforms_needed(model, dim))
    return transform_uniforms(model, dim, u)


# -- root counting ---------------------------------------------------------------

def _trim(c, thr):
    k = len(c)
    while k > 1 and abs(c[k - 1]) <= thr:
        k -= 1
    return c[:k]


def sturm_chain(coeffs) -> list[np.ndarray]:
    """Normalized Sturm sequence of an ascending coefficient vector."""
    c = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        raise DegenerateSample("identically zero polynomial")
    p0 = _trim(c / scale, STURM_DROP)
    chain = [p0]
    if len(p0) == 1:
        return chain
    p1 = npoly.polyder(p0)
    chain.append(_trim(p1 / np.max(np.abs(p1)), STURM_DROP))
    while len(chain[-1]) > 1:
        _, r = npoly.polydiv(chain[-2], chain[-1])
        m = np.max(np.abs(r))
        if m <= STURM_DROP * np.max(np.abs(chain[-2])):
            break
        chain.append(_trim(-r / m, STURM_DROP))
    return chain


def _variations(chain, x):
    v = np.array([npoly.polyval(x, p) for p in chain])
    s = np.sign(v[v != 0.0])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def sturm_count(coeffs, lo: float, hi: float) -> int:
    """Distinct real roots in (lo, hi]."""
    chain = sturm_chain(coeffs)
    return _variations(chain, lo) - _variations(chain, hi)


def companion_count(coeffs, lo: float, hi: float, poly_eps=1e-7, cluster_tol=1e-9) -> int:
    c = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        raise DegenerateSample("identically zero polynomial")
    c = _trim(c / scale, STURM_DROP)
    if len(c) == 1:
        return 0
    z = npoly.polyroots(c)
    real = z[np.abs(z.imag) <= poly_eps * np.maximum(1.0, np.abs(z))].real
    real = np.sort(real[(real > lo) & (real <= hi)])
    return len(merge_clusters(list(real), cluster_tol))


class GridCounter:
    """Sign-change counting on a fixed grid, vectorized over a batch of samples.

    Basis values on the grid do not depend on x, so they are computed once. A
    cell without a sign change whose end slopes disagree is checked with the
    cubic Hermite interpolant for a dip through zero.
    """

    def __init__(self, family: BasisFamily, interval: Interval, grid: int = 16):
        lo, hi = interval
        n = max(grid, int(math.ceil(64 * family.dim * interval.length)) + 1)
        self.t = np.linspace(lo, hi, n)
        self.h = self.t[1] - self.t[0]
        j = family.jets(self.t)
        self.B = j[0]       # (dim+1, n)
        self.dB = j[1]

    def values(self, X):
        X = np.atleast_2d(X)
        return self.B[0] + X @ self.B[1:], self.dB[0] + X @ self.dB[1:]

    def _slopes(self, X, rows, cols):
        return self.dB[0, cols] + np.einsum("ij,ji->i", X[rows], self.dB[1:, cols])

    def count(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        F = self.B[0] + X @ self.B[1:]
        pos = F > 0.0
        change = pos[:, 1:] != pos[:, :-1]
        out = change.sum(axis=1)
        out += self._dips(X, F, change)
        zero_rows = np.nonzero(np.any(F == 0.0, axis=1))[0]
        if zero_rows.size:
            Fz = F[zero_rows]
            out[zero_rows] = self._count_with_zeros(Fz) + self._dips(X[zero_rows], Fz, (Fz[:, 1:] > 0) != (Fz[:, :-1] > 0))
            out[zero_rows[~np.any(Fz != 0.0, axis=1)]] = DEGENERATE
        return out

    @staticmethod
    def _count_with_zeros(F):
        # exact zeros at nodes (excluding the left end) count once per run
        s = np.sign(F)
        nz = s[:, 1:] == 0.0
        runs = nz & ~np.concatenate([np.zeros((F.shape[0], 1), bool), nz[:, :-1]], axis=1)
        return runs.sum(axis=1) + (s[:, :-1] * s[:, 1:] < 0).sum(axis=1)

    def _dips(self, X, F, change):
        # an extremum inside cell c makes node c or c + 1 a discrete extremum
        up = np.diff(F, axis=1) > 0.0
        turn = np.zeros(change.shape, dtype=bool)
        node = up[:, 1:] != up[:, :-1]          # discrete extremum at interior node k + 1
        turn[:, :-1] |= node
        turn[:, 1:] |= node
        turn[:, [0, -1]] = True
        rows, cols = np.nonzero(turn & ~change)
        extra = np.zeros(F.shape[0], dtype=np.int64)
        f0, f1 = F[rows, cols], F[rows, cols + 1]
        keep = f0 * f1 > 0
        rows, cols, f0, f1 = rows[keep], cols[keep], f0[keep], f1[keep]
        s0, s1 = self._slopes(X, rows, cols), self._slopes(X, rows, cols + 1)
        keep = s0 * s1 < 0
        rows, cols, f0, f1, s0, s1 = rows[keep], cols[keep], f0[keep], f1[keep], s0[keep], s1[keep]
        if rows.size == 0:
            return extra
        h = self.h
        d0, d1 = h * s0, h * s1
        a2 = -3 * f0 - 2 * d0 + 3 * f1 - d1
        a3 = 2 * f0 + d0 - 2 * f1 + d1
        # p'(u) = d0 + 2 a2 u + 3 a3 u^2 on [0, 1]
        A, Bq, C = 3 * a3, 2 * a2, d0
        disc = np.maximum(Bq * Bq - 4 * A * C, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = -0.5 * (Bq + np.copysign(np.sqrt(disc), Bq))
            r1 = np.where(A != 0, q / A, np.nan)
            r2 = np.where(q != 0, C / q, np.nan)
        best = np.full(rows.shape, np.inf)
        sg = np.sign(f0)
        for u in (r1, r2):
            ok = (u > 0) & (u < 1)
            uu = np.where(ok, u, 0.5)
            p = f0 + d0 * uu + a2 * uu**2 + a3 * uu**3
            best = np.where(ok, np.minimum(best, sg * p), best)
        hit = best <= 0.0
        np.add.at(extra, rows[hit], np.where(best[hit] < 0.0, 2, 1))
        return extra


def count_roots(family: BasisFamily, x, interval: Interval, cfg: RootCountConfig | None = None) -> int:
    """Number of distinct real zeros of t -> F(t; x) in the interval."""
    cfg = cfg or RootCountConfig()
    x = _check_x(family, x)
    if cfg.method == "grid":
        c = int(GridCounter(family, interval, cfg.grid).count(x[None])[0])
        if c == DEGENERATE:
            raise DegenerateSample("F vanishes identically on the grid")
        return c
    coeffs = family.coefficients(x)
    if cfg.method == "sturm":
        return sturm_count(coeffs, interval.lo, interval.hi)
    return companion_count(coeffs, interval.lo, interval.hi, cfg.poly_eps, cfg.cluster_tol)


# -- estimators --------------------------------------------------------------------

def _count_chunk(family, model, interval, cfg, seed, start, count, counter):
    X = draw_samples(model, family.dim, seed, start, count)
    if cfg.method == "grid":
        return counter.count(X)
    out = np.empty(count, dtype=np.int64)
    fn = sturm_count if cfg.method == "sturm" else (
        lambda c, lo, hi: companion_count(c, lo, hi, cfg.poly_eps, cfg.cluster_tol))
    for i, x in enumerate(X):
        try:
            out[i] = fn(family.coefficients(x), interval.lo, interval.hi)
        except DegenerateSample:
            out[i] = DEGENERATE
    return out


def _chunks(samples):
    return [(s, min(CHUNK, samples - s)) for s in range(0, samples, CHUNK)]


def _run_chunks(fn, samples, threads):
    jobs = _chunks(samples)
    if threads <= 1:
        parts = [fn(s, c) for s, c in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda sc: fn(*sc), jobs))
    return np.concatenate(parts)


def estimate_expectation(family: BasisFamily, model, interval: Interval, samples: int, seed: int,
                         cfg: RootCountConfig | None = None, threads: int = 1) -> MCEstimate:
    """Sample mean of the zero count with its standard error."""
    cfg = cfg or RootCountConfig()
    if samples < 100:
        raise InvalidInput("need at least 100 samples")
    if cfg.method != "grid" and not family.is_polynomial:
        raise InvalidInput(f"{cfg.method} root counting needs a polynomial family")
    counter = GridCounter(family, interval, cfg.grid) if cfg.method == "grid" else None
    counts = _run_chunks(
        lambda s, c: _count_chunk(family, model, interval, cfg, seed, s, c, counter), samples, threads)
    keys, freq = np.unique(counts, return_counts=True)
    hist = {int(k): int(f) for k, f in zip(keys, freq)}
    good = counts[counts != DEGENERATE].astype(float)
    n = good.size
    mean = float(good.sum() / n) if n else math.nan
    se = float(good.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return MCEstimate(mean, se, int(n), hist, int(seed), hist.get(DEGENERATE, 0))


def wedge_H_estimate(family: BasisFamily, model, t: float, eps: float = 1e-3, samples: int = 10**6,
                     seed: int = 0, richardson: bool = False, threads: int = 1) -> tuple[float, float]:
    """Estimate H(t) as P[F(t; x) F(t + eps; x) <= 0] / eps, with its standard error.

    The bias is O(eps). ``richardson`` combines eps and eps/2 on the same
    samples to cancel the leading term.
    """
    if not eps > 0:
        raise InvalidInput("eps must be positive")
    if samples < 100:
        raise InvalidInput("need at least 100 samples")
    steps = [eps, 0.5 * eps] if richardson else [eps]
    J = family.jets(np.array([t] + [t + e for e in steps]))[0]  # (dim+1, 1+len(steps))

    def chunk(s, c):
        X = draw_samples(model, family.dim, seed, s, c)
        F = J[0] + X @ J[1:]
        hits = [(F[:, 0] * F[:, k + 1] <= 0.0) & np.any(F != 0.0, axis=1) for k in range(len(steps))]
        if richardson:
            return 2.0 * hits[1] / steps[1] - hits[0] / steps[0]
        return hits[0] / eps

    y = _run_chunks(chunk, samples, threads)
    return float(y.mean()), float(y.std(ddof=1) / math.sqrt(y.size))
