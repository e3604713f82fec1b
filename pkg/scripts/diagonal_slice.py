"""Export P(theta, theta) together with the three diagonal state coefficients."""

import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from common import parse_config

from hardy_lab.hardy import diagonal_coefficients, probability_diagonal


@dataclass
class Config:
    resolution: int = 721
    out: str = "results/diagonal.csv"


def main(cfg: Config) -> None:
    deg = np.linspace(0.0, 360.0, cfg.resolution)
    path = Path(cfg.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("theta_deg", "probability", "c_pm", "c_mp", "c_mm"))
        for d in deg:
            t = math.radians(d)
            p = probability_diagonal(t)
            # the coefficients are undefined where both sides are degenerate
            coeffs = diagonal_coefficients(t) if abs(math.remainder(t, math.pi)) > 1e-9 \
                else (math.nan,) * 3
            w.writerow([format(x, ".17g") for x in (d, p, *coeffs)])
    print(f"wrote {path}")


if __name__ == "__main__":
    main(parse_config(Config, sys.argv[1:], __doc__))
