"""Noise robustness of anticommuting sharp measurements versus the QC boundary.

For g pairwise anticommuting observables the compatible region is exactly
the Euclidean ball, so the robustness along a direction s is 1 / ||s||_2.
The script bisects the SDP predicate along several directions and reports
the deviation from that prediction, with timings.
"""

from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass

import numpy as np

from compatnorm.measure import EffectTuple, embed, robustness
from compatnorm.regions import anticommuting_family


@dataclass
class Config:
    g_values: tuple[int, ...] = (2, 3, 4, 5)
    n_directions: int = 4
    extra_dims: tuple[int, ...] = (0, 1)  # zero-padding added to the minimal dimension
    seed: int = 0
    tol: float = 1e-5


def main(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    print(f"{'g':>2} {'d':>2} {'direction':<28} {'t*':>10} {'1/|s|':>10} {'dev':>9} {'sec':>6}")
    for g in cfg.g_values:
        fam = anticommuting_family(max(1, math.ceil((g - 1) / 2)))[:g]
        base = EffectTuple((fam + np.eye(fam.shape[1])[None]) / 2)
        dirs = [np.ones(g)] + [np.abs(rng.standard_normal(g)) for _ in range(cfg.n_directions - 1)]
        for extra in cfg.extra_dims:
            e = embed(base, base.d + extra) if extra else base
            for s in dirs:
                s = s / s.max()
                t0 = time.perf_counter()
                t = robustness(e, s, tol=cfg.tol).threshold
                dt = time.perf_counter() - t0
                pred = min(1.0, 1 / np.linalg.norm(s))
                label = "(" + ",".join(f"{v:.2f}" for v in s) + ")"
                print(f"{g:>2} {e.d:>2} {label:<28} {t:>10.6f} {pred:>10.6f} {t - pred:>9.1e} {dt:>6.2f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--g", type=int, nargs="+", default=list(Config.g_values))
    p.add_argument("--directions", type=int, default=Config.n_directions)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(tuple(a.g), a.directions, seed=a.seed))
