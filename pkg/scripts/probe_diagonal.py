"""Bracket the uniform-noise threshold of Gamma(g, d) along the diagonal.

The lower bound is the best known inner bound, max(tau*(d), 1/sqrt(g)) for
cells where QC is not known to be exact. The upper bound is the smallest
visibility at which the sampler finds an incompatible noisy tuple, located
by bisection on the probe verdict. Random sampling can only certify upper
bounds; a gap between the two columns is expected, not an error.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from compatnorm.regions import gamma_probe, known_gamma, tau_star


@dataclass
class Config:
    cells: tuple[tuple[int, int], ...] = ((2, 2), (3, 2), (4, 2), (3, 3), (4, 3))
    samples: int = 24
    seed: int = 7
    steps: int = 12
    workers: int = 1


def upper_bound(g: int, d: int, cfg: Config) -> float:
    lo, hi = 0.0, 1.0
    if not gamma_probe(g, d, [1.0] * g, cfg.samples, cfg.seed, workers=cfg.workers).found:
        return 1.0
    for _ in range(cfg.steps):
        mid = (lo + hi) / 2
        if gamma_probe(g, d, [mid] * g, cfg.samples, cfg.seed, workers=cfg.workers).found:
            hi = mid
        else:
            lo = mid
    return hi


def main(cfg: Config) -> None:
    print(f"{'g':>2} {'d':>2} {'known':>14} {'tau*':>8} {'1/sqrt g':>9} {'probe ub':>9}")
    for g, d in cfg.cells:
        region = known_gamma(g, d)
        ub = upper_bound(g, d, cfg)
        print(
            f"{g:>2} {d:>2} {region.value if region else '-':>14} {tau_star(d).value:>8.4f} "
            f"{1 / math.sqrt(g):>9.4f} {ub:>9.4f}"
        )


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--workers", type=int, default=Config.workers)
    a = p.parse_args()
    main(Config(samples=a.samples, seed=a.seed, workers=a.workers))
