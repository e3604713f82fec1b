"""Export the contradiction-probability surface over [0, 360]^2 degrees as long-format CSV."""

import csv
import sys
from dataclasses import dataclass
from pathlib import Path

from common import parse_config

from hardy_lab.optimize import scan


@dataclass
class Config:
    resolution: int = 361
    out: str = "results/surface.csv"


def main(cfg: Config) -> None:
    grid = scan(cfg.resolution)
    path = Path(cfg.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("theta1_deg", "theta2_deg", "probability"))
        for row in grid.rows():
            w.writerow([format(x, ".17g") for x in row])
    print(f"wrote {path} ({cfg.resolution}x{cfg.resolution}), max={grid.values.max():.9f}")


if __name__ == "__main__":
    main(parse_config(Config, sys.argv[1:], __doc__))
