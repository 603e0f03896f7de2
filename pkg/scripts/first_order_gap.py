#!/usr/bin/env python3
"""Table of the first-order and asymptotic rate predictions against the exact
rate at the Lloyd deployment, uniform density on [0, 1000] m.

    python scripts/first_order_gap.py [--delta 0.5] [--heights 80 300] [--n 1 2 4 8 16 64]

The relative gap of the first-order prediction shrinks roughly like 1/n^2:
what it leaves out is the curvature of the NLOS term, of order (d/h)^2.
"""
import argparse

from uavopt.asymptotic import rate_ceiling, rate_thm2, rate_thm3
from uavopt.channel import ChannelParams
from uavopt.deployment import expected_rate
from uavopt.density import Uniform1D
from uavopt.solvers import lloyd_l1


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--heights", type=float, nargs="+", default=[80.0, 300.0])
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6, 8, 10, 16, 32, 64])
    args = ap.parse_args()
    spec = Uniform1D(0.0, 1000.0)
    print(f"{'h':>6} {'n':>4} {'exact':>10} {'first-order':>12} {'gap %':>8} {'asymptotic':>11} {'gap %':>8}")
    for h in args.heights:
        p = ChannelParams.from_db(50.0, delta=args.delta, h=h)
        for n in args.n:
            dep = lloyd_l1(n, spec, altitude=h).deployment
            exact = expected_rate(dep, p, spec)
            r2, r3 = rate_thm2(dep, p, spec), rate_thm3(n, p, spec)
            print(f"{h:6g} {n:4d} {exact:10.6f} {r2:12.6f} {100 * (r2 - exact) / exact:8.3f} "
                  f"{r3:11.6f} {100 * (r3 - exact) / exact:8.3f}")
        print(f"{'':6} ceiling {rate_ceiling(p):.6f}")


if __name__ == "__main__":
    main()
