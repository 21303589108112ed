"""Mixing time of the lazy construction versus n, with the canonical-path congestion."""

import argparse
import math

import numpy as np

from spectregap.construction import rogue_matrix
from spectregap.mixing import canonical_paths_bound, mixing_time
from spectregap.pf import additive_symmetrize, lazify


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ns", default="16,36,64,144,256")
    ap.add_argument("--eps", type=float, default=0.25)
    args = ap.parse_args()
    rows = []
    for n in (int(x) for x in args.ns.split(",")):
        L = lazify(rogue_matrix(n))
        tau = mixing_time(L, eps=args.eps)
        rho = canonical_paths_bound(additive_symmetrize(L).to_float(), eps=args.eps).rho
        rows.append((n, tau, rho))
        print(f"n={n:>4}  tau={tau:>5}  tau/(sqrt(n) ln n)={tau / (math.sqrt(n) * math.log(n)):.3f}"
              f"  rho={rho:.2f}  rho/sqrt(n)={rho / math.sqrt(n):.3f}")
    n, tau, _ = map(np.array, zip(*rows))
    slope = np.polyfit(np.log(n), np.log(tau.astype(float)), 1)[0]
    print(f"log-log slope of tau: {slope:.3f}")


if __name__ == "__main__":
    main()
