"""Locate the maxima numerically and summarize the golden-ratio structure at each."""

import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from common import parse_config, write_json

from hardy_lab.hardy import GOLDEN, GOLDEN_ANGLE, P_MAX, MeasurementSetup, construct_state
from hardy_lab.nonlocality import lhv_bound
from hardy_lab.optimize import find_maxima, verify_golden
from hardy_lab.schmidt import classify, decompose


@dataclass
class Config:
    resolution: int = 361
    refine_tol: float = 1e-7
    out: str = "results/golden_report.json"


def main(cfg: Config) -> None:
    start = time.perf_counter()
    maxima = find_maxima(cfg.resolution, cfg.refine_tol)
    elapsed = time.perf_counter() - start
    entries = []
    for m in maxima:
        setup = MeasurementSetup.from_relative(m.theta_1, m.theta_2)
        state = construct_state(setup)
        form = decompose(state)
        entries.append({
            "golden_check": verify_golden(m).to_dict(),
            "squared_coefficients": state.squared(),
            "schmidt": {
                "lambda_plus": form.lambda_plus,
                "lambda_minus": form.lambda_minus,
                "phi_a_minus_theta_a_deg": math.degrees(form.phi_a - setup.theta_a) % 360,
                "phi_b_minus_theta_b_deg": math.degrees(form.phi_b - setup.theta_b) % 360,
                "class": classify(form).tag.value,
            },
            "gap_over_lhv": m.p_max - lhv_bound(),
        })
    write_json(Path(cfg.out), {
        "golden_ratio": GOLDEN,
        "theta0_deg_exact": math.degrees(GOLDEN_ANGLE),
        "p_max_exact": P_MAX,
        "search_seconds": elapsed,
        "maxima": entries,
    })


if __name__ == "__main__":
    main(parse_config(Config, sys.argv[1:], __doc__))
