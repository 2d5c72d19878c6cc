"""Motivic measures of random integer-center descriptions against residue counts.

For each prime and depth, reports how many descriptions were decided at that
depth, how many matched theta_p of the symbolic measure, and the time taken.
"""
from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass

from motint.oracle import DepthError, padic_measure, theta_counts
from motint.sampling import rand_integer_description
from motint.valfield import measure


@dataclass
class PadicConfig:
    n: int = 30
    seed: int = 0
    primes: tuple = (3, 5, 7)
    depths: tuple = (4, 6, 8)


def run(cfg: PadicConfig):
    rng = random.Random(cfg.seed)
    descs = [rand_integer_description(rng, primes=cfg.primes) for _ in range(cfg.n)]
    measures = [measure(d) for d in descs]
    rows = []
    for p in cfg.primes:
        for N in cfg.depths:
            if p ** N > 5_000_000:
                continue
            t = time.perf_counter()
            decided = matched = 0
            for d, m in zip(descs, measures):
                try:
                    v = padic_measure(d, p, N)
                except DepthError:
                    continue
                decided += 1
                matched += v == theta_counts(m, p)
            rows.append((p, N, decided, matched, time.perf_counter() - t))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(f"{'p':>3} {'N':>3} {'decided':>8} {'matched':>8} {'seconds':>8}")
    for p, N, dec, mat, dt in run(PadicConfig(args.n, args.seed)):
        print(f"{p:>3} {N:>3} {dec:>8} {mat:>8} {dt:>8.2f}")


if __name__ == "__main__":
    main()
