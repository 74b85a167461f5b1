"""Quadrature vs closed form for trigonometric families, uniform and Gaussian."""
import argparse
import csv
import math
import sys

from rzero.density import IsotropicGaussian, UniformBall
from rzero.expectation import expected_zeros
from rzero.family import Interval, trig_family
from rzero.zero_density import trig_expectation_gaussian, trig_expectation_uniform


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3, 4, 6])
    ap.add_argument("--rel-tol", type=float, default=1e-8)
    args = ap.parse_args(argv)
    iv = Interval(0.0, 2 * math.pi)
    w = csv.writer(sys.stdout)
    w.writerow(["model", "n", "scale", "d", "quadrature", "closed_form", "rel_err"])
    for n in args.n:
        for r in (0.5, 1.0, 2.0):
            for d in (0.0, 0.3 * r * math.sqrt(n), 0.9 * r * math.sqrt(n)):
                q = expected_zeros(trig_family(n, d), UniformBall(r), iv, rel_tol=args.rel_tol).value
                c = trig_expectation_uniform(n, d, r)
                w.writerow(["uniform", n, r, f"{d:.6g}", f"{q:.12g}", f"{c:.12g}", f"{abs(q - c) / c:.2e}"])
        for sigma in (0.5, 1.0):
            for d in (0.0, 1.0):
                q = expected_zeros(trig_family(n, d), IsotropicGaussian(sigma), iv, rel_tol=args.rel_tol).value
                c = trig_expectation_gaussian(n, d, sigma)
                w.writerow(["gaussian", n, sigma, d, f"{q:.12g}", f"{c:.12g}", f"{abs(q - c) / c:.2e}"])


if __name__ == "__main__":
    main()
