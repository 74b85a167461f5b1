"""E/n for Gaussian trig families with d = u*sqrt(n) approaching (2/sqrt 3) exp(-u^2/2)."""
import argparse
import math

from rzero.zero_density import trig_expectation_gaussian


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--u", type=float, default=1.0)
    args = ap.parse_args(argv)
    limit = 2 / math.sqrt(3) * math.exp(-args.u**2 / 2)
    print(f"limit {limit:.8f}")
    for n in (10, 25, 50, 100, 200, 400, 800, 1600):
        v = trig_expectation_gaussian(n, args.u * math.sqrt(n), 1.0) / n
        print(f"n={n:5d}  E/n={v:.8f}  rel diff {(v - limit) / limit:+.3e}")


if __name__ == "__main__":
    main()
