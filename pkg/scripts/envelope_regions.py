"""Envelope curve and region labels for a two-parameter family, written as CSV."""
import argparse
import csv
import math

import numpy as np

from rzero.envelope import classify, count_tangents, envelope_curve
from rzero.family import Interval, trig_family


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.1)
    ap.add_argument("--hi", type=float, default=1.2)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--curve-out", default="envelope_curve.csv")
    ap.add_argument("--points-out", default="envelope_points.csv")
    args = ap.parse_args(argv)
    fam, iv = trig_family(1, d=-1.0), Interval(args.lo, args.hi)
    with open(args.curve_out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x1", "x2", "s2"])
        w.writerows(envelope_curve(fam, iv, num=401))
    pts = np.random.default_rng(args.seed).uniform(-3, 3, (args.points, 2))
    mismatches = 0
    with open(args.points_out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "region", "count", "tangents"])
        for p in pts:
            lab = classify(fam, iv, p)
            n = count_tangents(fam, iv, p)
            mismatches += lab.count != n
            w.writerow([p[0], p[1], lab.region, lab.count, n])
    print(f"wrote {args.curve_out}, {args.points_out}; {mismatches} mismatches on {args.points} points")
    return 0 if mismatches == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
