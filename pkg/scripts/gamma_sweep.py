"""Tabulate the Gamma witness against 1/sqrt(n) and 1/(35n) over perfect squares."""

import argparse
import math

from spectregap.bounds import gamma_witness


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-m", type=int, default=12)
    args = ap.parse_args()
    print(f"{'n':>5} {'witness':>10} {'1/sqrt(n)':>10} {'ratio':>7} {'1/(35n)':>10}  route")
    for m in range(2, args.max_m + 1):
        g = gamma_witness(m * m)
        ratio = g.gamma_upper_witness * math.sqrt(g.n)
        print(f"{g.n:>5} {g.gamma_upper_witness:>10.5f} {g.inv_sqrt_n:>10.5f} {ratio:>7.3f} "
              f"{g.gamma_lower_bound:>10.2e}  {g.lambda2_route}")


if __name__ == "__main__":
    main()
