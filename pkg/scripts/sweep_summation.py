"""Closed-form sums against truncated numeric sums on random constructible functions.

Writes one CSV row per (function, q): dimension, closed value, numeric value,
relative error, truncation box and the time spent on each side.
"""
from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from motint.oracle import numeric_sum
from motint.sampling import rand_cpf
from motint.summation import mu_sum


@dataclass
class SweepConfig:
    n: int = 200
    seed: int = 0
    terms: int = 3
    qs: tuple = (Fraction(2), Fraction(3), Fraction(7, 2))


def sweep(cfg: SweepConfig, out):
    rng = random.Random(cfg.seed)
    w = csv.writer(out)
    w.writerow(["k", "r", "q", "closed", "numeric", "rel_err", "box", "t_closed", "t_numeric"])
    worst = 0.0
    for k in range(cfg.n):
        r = 1 + k % 2
        vs = ["i", "j"][:r]
        phi = rand_cpf(rng, r, terms=cfg.terms)
        t0 = time.perf_counter()
        closed = mu_sum(phi, vs)
        t1 = time.perf_counter()
        for q in cfg.qs:
            want = float(closed.eval_theta({}, q))
            t2 = time.perf_counter()
            res = numeric_sum(phi, vs, q)
            t3 = time.perf_counter()
            err = abs(want - res.value) / max(abs(want), 1e-300)
            worst = max(worst, err)
            w.writerow([k, r, str(q), f"{want:.15g}", f"{res.value:.15g}", f"{err:.3e}", res.box,
                        f"{t1 - t0:.4f}", f"{t3 - t2:.4f}"])
    return worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--terms", type=int, default=3)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args(argv)
    cfg = SweepConfig(args.n, args.seed, args.terms)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            worst = sweep(cfg, fh)
    else:
        worst = sweep(cfg, sys.stdout)
    print(f"max relative error {worst:.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
