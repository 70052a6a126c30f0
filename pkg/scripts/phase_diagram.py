"""Export the (g, d) phase-diagram grid as CSV and JSON."""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from compatnorm.regions import phase_diagram, phase_diagram_csv


@dataclass
class Config:
    g_max: int = 10
    d_max: int = 16
    out_dir: Path = Path("results")


def main(cfg: Config) -> None:
    cells = phase_diagram(cfg.g_max, cfg.d_max)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "phase_diagram.csv").write_text(phase_diagram_csv(cells))
    doc = {"config": {k: str(v) for k, v in asdict(cfg).items()}, "cells": [c.to_json() for c in cells]}
    (cfg.out_dir / "phase_diagram.json").write_text(json.dumps(doc, indent=1))
    counts: dict[str, int] = {}
    for c in cells:
        counts[c.classification.value] = counts.get(c.classification.value, 0) + 1
    print(f"{len(cells)} cells -> {cfg.out_dir}: {counts}")
    # compact text map: rows g, columns d
    sym = {"QcExact": "E", "QcStrictlyContained": "S", "Unresolved": "."}
    print("g\\d " + "".join(f"{d % 10}" for d in range(1, cfg.d_max + 1)))
    for g in range(1, cfg.g_max + 1):
        row = [sym[c.classification.value] for c in cells if c.g == g]
        print(f"{g:>3} " + "".join(row))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--g-max", type=int, default=Config.g_max)
    p.add_argument("--d-max", type=int, default=Config.d_max)
    p.add_argument("--out-dir", type=Path, default=Config.out_dir)
    a = p.parse_args()
    main(Config(a.g_max, a.d_max, a.out_dir))
