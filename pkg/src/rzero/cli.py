"""Command-line job runner: ``rzero <command> --job file.json [--out F] [--threads N] [--seed S]``.

Exit codes: 0 ok, 2 malformed job, 3 numerical failure. Errors are written to
stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .density import UniformBall, density_from_spec, density_to_spec
from .envelope import envelope_curve
from .errors import InvalidDensity, InvalidInput, RZeroError
from .expectation import DEFAULT_REL_TOL, expected_zeros, h_function
from .family import Interval, family_from_spec
from .mc_oracle import RootCountConfig, estimate_expectation
from .zero_density import h_uniform_ball

COMMANDS = ("compute", "verify", "density", "envelope", "sweep")
SWEEP_PARAMS = ("n", "d", "r", "sigma")
EXIT_SCHEMA, EXIT_NUMERIC = 2, 3


class SchemaError(InvalidInput):
    pass


@dataclass
class Job:
    command: str
    family: dict
    density: dict | None = None
    interval: tuple[float, float] | None = None
    rel_tol: float = DEFAULT_REL_TOL
    mc: dict = field(default_factory=dict)
    t_grid: dict | None = None
    sweep: dict | None = None
    format: str | None = None

    @classmethod
    def from_dict(cls, raw: dict, command: str | None = None) -> "Job":
        if not isinstance(raw, dict):
            raise SchemaError("job must be a JSON object")
        cmd = command or raw.get("command")
        if raw.get("command") not in (None, cmd):
            raise SchemaError(f"job command {raw['command']!r} does not match {cmd!r}")
        if cmd not in COMMANDS:
            raise SchemaError(f"command must be one of {COMMANDS}")
        if "family" not in raw:
            raise SchemaError("job needs a 'family'")
        known = {"command", "family", "density", "interval", "rel_tol", "mc", "t_grid", "sweep", "format"}
        extra = set(raw) - known
        if extra:
            raise SchemaError(f"unknown job fields {sorted(extra)}")
        iv = raw.get("interval")
        if iv is not None:
            if not (isinstance(iv, (list, tuple)) and len(iv) == 2):
                raise SchemaError("interval must be [lo, hi]")
            iv = (float(iv[0]), float(iv[1]))
        fmt = raw.get("format")
        if fmt not in (None, "json", "csv"):
            raise SchemaError("format must be json or csv")
        job = cls(cmd, raw["family"], raw.get("density"), iv, float(raw.get("rel_tol", DEFAULT_REL_TOL)),
                  dict(raw.get("mc") or {}), raw.get("t_grid"), raw.get("sweep"), fmt)
        job._require()
        return job

    def _require(self):
        need = {
            "compute": ("density", "interval"),
            "verify": ("density", "interval"),
            "density": ("density", "t_grid"),
            "envelope": ("interval",),
            "sweep": ("sweep",),
        }[self.command]
        for name in need:
            if getattr(self, name) is None:
                raise SchemaError(f"{self.command} job needs '{name}'")
        if self.sweep is not None:
            if self.sweep.get("param") not in SWEEP_PARAMS:
                raise SchemaError(f"sweep.param must be one of {SWEEP_PARAMS}")
            if not isinstance(self.sweep.get("values"), list) or not self.sweep["values"]:
                raise SchemaError("sweep.values must be a non-empty list")
            if self.sweep.get("quantity", "expectation") not in ("expectation", "density"):
                raise SchemaError("sweep.quantity must be expectation or density")


def spec_hash(family_spec: dict, density_spec: dict | None, interval) -> str:
    """SHA-256 of the canonical JSON of the objects a job resolves to."""
    doc = {"family": family_spec, "density": density_spec,
           "interval": None if interval is None else [float(interval[0]), float(interval[1])]}
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _t_values(grid: dict) -> np.ndarray:
    if "t" in grid:
        return np.asarray(grid["t"], dtype=float)
    try:
        return np.linspace(float(grid["lo"]), float(grid["hi"]), int(grid["num"]))
    except KeyError as exc:
        raise SchemaError(f"t_grid needs lo, hi, num or an explicit t list ({exc})") from exc


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) or isinstance(v, str):
        return str(v)
    return format(float(v), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# -- commands ---------------------------------------------------------------

def _resolve(job: Job, family_spec=None, density_spec=None):
    fam = family_from_spec(family_spec or job.family)
    model = density_from_spec(density_spec or job.density) if (density_spec or job.density) else None
    iv = Interval(*job.interval) if job.interval is not None else None
    return fam, model, iv


def _hash_for(fam, model, iv):
    return spec_hash(fam.to_spec(), density_to_spec(model) if model else None, iv and (iv.lo, iv.hi))


def run_compute(job: Job, threads: int, seed: int | None):
    fam, model, iv = _resolve(job)
    res = expected_zeros(fam, model, iv, rel_tol=job.rel_tol)
    out = res.to_dict()
    out["spec_hash"] = _hash_for(fam, model, iv)
    return out, ["value", "abs_error_estimate", "xi_count", "subintervals"], [
        [res.value, res.abs_error_estimate, res.xi_count, res.subintervals]]


def run_verify(job: Job, threads: int, seed: int | None):
    fam, model, iv = _resolve(job)
    mc = job.mc
    samples = int(float(mc.get("samples", 10**5)))
    seed = int(mc.get("seed", 0)) if seed is None else seed
    cfg = RootCountConfig(mc.get("method", "grid"), int(mc.get("grid", 16)),
                          float(mc.get("cluster_tol", 1e-9)), float(mc.get("poly_eps", 1e-7)))
    est = estimate_expectation(fam, model, iv, samples, seed, cfg, threads=threads)
    analytic = expected_zeros(fam, model, iv, rel_tol=job.rel_tol).value
    z = (est.mean - analytic) / est.std_error if est.std_error > 0 else (
        0.0 if est.mean == analytic else math.copysign(math.inf, est.mean - analytic))
    out = {"mc_mean": est.mean, "mc_se": est.std_error, "analytic": analytic, "z_score": z,
           "samples": est.samples, "seed": seed, "method": cfg.method,
           "histogram": est.to_dict()["histogram"], "degenerate": est.degenerate,
           "spec_hash": _hash_for(fam, model, iv)}
    return out, ["mc_mean", "mc_se", "analytic", "z_score"], [[est.mean, est.std_error, analytic, z]]


def _density_rows(fam, model, ts):
    """Rows (t, H, case, a, chi); a and chi do not depend on the ball radius."""
    if isinstance(model, UniformBall):
        pts = [h_uniform_ball(fam, model.r, t) for t in ts]
        return [(p.t, p.value, p.case, p.a, p.chi) for p in pts]
    H = h_function(fam, model)
    geo = [h_uniform_ball(fam, 1.0, t) for t in ts]
    return [(p.t, float(H(np.array([p.t]))[0]), "Radial", p.a, p.chi) for p in geo]


DENSITY_COLS = ["t", "H", "case", "a", "chi"]


def run_density(job: Job, threads: int, seed: int | None):
    fam, model, _ = _resolve(job)
    rows = _density_rows(fam, model, _t_values(job.t_grid))
    out = {"rows": [dict(zip(DENSITY_COLS, r)) for r in rows],
           "spec_hash": _hash_for(fam, model, None)}
    return out, DENSITY_COLS, rows


def run_envelope(job: Job, threads: int, seed: int | None):
    fam, _, iv = _resolve(job)
    num = int((job.t_grid or {}).get("num", 201))
    rows = envelope_curve(fam, iv, num)
    out = {"rows": [dict(zip(("t", "x1", "x2", "s2"), r)) for r in rows],
           "spec_hash": _hash_for(fam, None, iv)}
    return out, ["t", "x1", "x2", "s2"], rows


def _swept(job: Job, value):
    fam, dens = dict(job.family), dict(job.density or {})
    p = job.sweep["param"]
    if p in ("n", "d"):
        fam[p] = int(value) if p == "n" else float(value)
    elif p == "r":
        dens["r"] = float(value)
    else:
        dens["sigma"] = float(value)
    return fam, dens or None


def run_sweep(job: Job, threads: int, seed: int | None):
    p, quantity = job.sweep["param"], job.sweep.get("quantity", "expectation")
    rows, hashes = [], []
    for v in job.sweep["values"]:
        fam_spec, dens_spec = _swept(job, v)
        fam, model, iv = _resolve(job, fam_spec, dens_spec)
        if model is None:
            raise SchemaError("sweep needs a density")
        hashes.append(_hash_for(fam, model, iv))
        if quantity == "density":
            if job.t_grid is None:
                raise SchemaError("density sweep needs 't_grid'")
            rows += [(v, *row) for row in _density_rows(fam, model, _t_values(job.t_grid))]
        else:
            if iv is None:
                raise SchemaError("expectation sweep needs 'interval'")
            res = expected_zeros(fam, model, iv, rel_tol=job.rel_tol)
            rows.append((v, res.value, res.abs_error_estimate, res.xi_count))
    header = [p, *DENSITY_COLS] if quantity == "density" else [p, "value", "abs_error_estimate", "xi_count"]
    out = {"param": p, "quantity": quantity, "rows": [dict(zip(header, r)) for r in rows],
           "spec_hashes": hashes}
    return out, header, rows


RUNNERS = {"compute": run_compute, "verify": run_verify, "density": run_density,
           "envelope": run_envelope, "sweep": run_sweep}
DEFAULT_FORMAT = {"compute": "json", "verify": "json", "density": "csv", "envelope": "csv", "sweep": "csv"}


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def run(job: Job, out_path: str | None = None, threads: int = 1, seed: int | None = None) -> str:
    """Execute a job and return the rendered output (also written to ``out_path``)."""
    result, header, rows = RUNNERS[job.command](job, threads, seed)
    fmt = job.format or ("csv" if out_path and out_path.endswith(".csv") else
                         "json" if out_path and out_path.endswith(".json") else DEFAULT_FORMAT[job.command])
    text = (json.dumps(_json_safe(result), indent=2, sort_keys=True) + "\n") if fmt == "json" else _csv(header, rows)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _fail(code, exc):
    json.dump({"error": type(exc).__name__, "message": str(exc), "exit_code": code}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rzero", description="Expected real zero counts of random equations.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--job", required=True, help="JSON job file")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
    ap.add_argument("--seed", type=int, help="override mc.seed")
    args = ap.parse_args(argv)
    try:
        with open(args.job, encoding="utf-8") as fh:
            raw = json.load(fh)
        job = Job.from_dict(raw, args.command)
        fam, _, _ = _resolve(job)  # surface spec errors before any numerics
        del fam
    except (OSError, json.JSONDecodeError, InvalidInput, InvalidDensity, TypeError, ValueError) as exc:
        return _fail(EXIT_SCHEMA, exc)
    try:
        text = run(job, args.out, max(1, args.threads), args.seed)
    except (InvalidInput, InvalidDensity) as exc:
        return _fail(EXIT_SCHEMA, exc)
    except (RZeroError, ArithmeticError, ValueError) as exc:
        return _fail(EXIT_NUMERIC, exc)
    if not args.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
