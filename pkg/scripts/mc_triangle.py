"""Closed form / quadrature / Monte Carlo agreement on a few fixed setups."""
import argparse
import math
import time

from rzero.density import IsotropicGaussian, UniformBall
from rzero.expectation import expected_zeros
from rzero.family import Interval, kac_family, trig_family
from rzero.mc_oracle import RootCountConfig, estimate_expectation
from rzero.zero_density import trig_expectation_gaussian, trig_expectation_uniform

SETUPS = [
    ("trig(2,d=0.5) uniform r=1", trig_family(2, 0.5), UniformBall(1.0), Interval(0, 2 * math.pi),
     trig_expectation_uniform(2, 0.5, 1.0), "grid"),
    ("trig(3,d=1) gaussian s=1", trig_family(3, 1.0), IsotropicGaussian(1.0), Interval(0, 2 * math.pi),
     trig_expectation_gaussian(3, 1.0, 1.0), "grid"),
    ("kac(6) gaussian s=1 [0,0.9]", kac_family(6), IsotropicGaussian(1.0), Interval(0, 0.9), None, "sturm"),
    ("kac(4,d=0.5) uniform r=0.3 [-1.5,1.5]", kac_family(4, 0.5), UniformBall(0.3), Interval(-1.5, 1.5),
     None, "sturm"),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10**5)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    print(f"{'setup':40s} {'closed':>10s} {'quadrature':>12s} {'MC':>9s} {'SE':>8s} {'z':>6s} {'sec':>5s}")
    for name, fam, model, iv, closed, method in SETUPS:
        start = time.perf_counter()
        q = expected_zeros(fam, model, iv).value
        mc = estimate_expectation(fam, model, iv, args.samples, args.seed, RootCountConfig(method), args.threads)
        z = (mc.mean - q) / mc.std_error if mc.std_error > 0 else 0.0
        cf = f"{closed:10.6f}" if closed is not None else f"{'-':>10s}"
        print(f"{name:40s} {cf} {q:12.8f} {mc.mean:9.5f} {mc.std_error:8.5f} {z:+6.2f} "
              f"{time.perf_counter() - start:5.1f}")


if __name__ == "__main__":
    main()
