"""Command-line front end: ``hardy-lab <command> [flags]``.

Angles on the command line are degrees; everything inside the library is
radians. Results go to stdout (or ``--output``) as JSON, or CSV for the
grid exports ``scan`` and ``slice``.

Exit codes: 0 success, 2 invalid arguments, 3 domain error (for example a
degenerate setup).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import hardy, nonlocality, optimize, schmidt
from .hardy import HardyVariant, MeasurementSetup
from .spinalg import normalize_angle

SCHEMA_VERSION = 1
ANGLE_LIMIT_DEG = 720.0
GOLDEN_ANGLE_DEG = math.degrees(hardy.GOLDEN_ANGLE)
COMMANDS = ("construct", "check", "prob", "scan", "slice", "schmidt", "optimize", "lhv", "sample")
CSV_COMMANDS = ("scan", "slice")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3

DOMAIN_ERRORS = (
    hardy.DegenerateSetup,
    nonlocality.NotAHardyState,
    nonlocality.InsufficientSamples,
    optimize.NotGolden,
)


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


@dataclass
class RunConfig:
    command: str
    theta_a: float | None = None
    theta_a_prime: float | None = None
    theta_b: float | None = None
    theta_b_prime: float | None = None
    theta1: float | None = None
    theta2: float | None = None
    diagonal: float | None = None
    resolution: int = optimize.DEFAULT_RESOLUTION
    samples: int = 100_000
    seed: int = 0
    variant: HardyVariant = HardyVariant.ORIGINAL
    output_format: str = "json"
    output_path: str | None = None
    zero_tol: float | None = None
    sign: int = 1
    refine_tol: float = optimize.DEFAULT_REFINE_TOL

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        for name in ("theta_a", "theta_a_prime", "theta_b", "theta_b_prime",
                     "theta1", "theta2", "diagonal"):
            v = getattr(self, name)
            if v is None:
                continue
            if not math.isfinite(v) or abs(v) > ANGLE_LIMIT_DEG:
                raise ValidationError(
                    f"--{name.replace('_', '-')} must lie in [-720, 720] degrees, got {v}")
        absolute = [self.theta_a, self.theta_a_prime, self.theta_b, self.theta_b_prime]
        if (self.theta1 is not None or self.theta2 is not None) and any(
                v is not None for v in absolute):
            raise ValidationError("use either --theta1/--theta2 or the four absolute angles")
        if self.resolution < 2:
            raise ValidationError("--resolution must be >= 2")
        if self.command == "optimize" and self.resolution < 16:
            raise ValidationError("optimize needs --resolution >= 16")
        if self.samples < 1:
            raise ValidationError("--samples must be >= 1")
        if self.seed < 0:
            raise ValidationError("--seed must be non-negative")
        if self.zero_tol is not None and not (self.zero_tol >= 0.0):
            raise ValidationError("--zero-tol must be non-negative")
        if self.refine_tol <= 0.0:
            raise ValidationError("--refine-tol must be positive")
        if self.output_format not in ("json", "csv"):
            raise ValidationError("--format must be json or csv")
        if self.output_format == "csv" and self.command not in CSV_COMMANDS:
            raise ValidationError(f"--format csv is only available for {', '.join(CSV_COMMANDS)}")
        try:
            optimize.default_threads()
        except ValueError as exc:
            raise ValidationError(str(exc))

    def setup(self) -> MeasurementSetup:
        """Measurement setup in radians; missing angles default to the golden optimum."""
        if self.theta1 is not None or self.theta2 is not None:
            t1 = GOLDEN_ANGLE_DEG if self.theta1 is None else self.theta1
            t2 = GOLDEN_ANGLE_DEG if self.theta2 is None else self.theta2
            degs = (0.0, t1, 0.0, t2)
        else:
            degs = (
                0.0 if self.theta_a is None else self.theta_a,
                GOLDEN_ANGLE_DEG if self.theta_a_prime is None else self.theta_a_prime,
                0.0 if self.theta_b is None else self.theta_b,
                GOLDEN_ANGLE_DEG if self.theta_b_prime is None else self.theta_b_prime,
            )
        return MeasurementSetup(*(normalize_angle(math.radians(d)) for d in degs))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardy-lab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        g = p.add_argument_group("measurement directions (degrees)")
        g.add_argument("--theta-a", type=float)
        g.add_argument("--theta-a-prime", type=float)
        g.add_argument("--theta-b", type=float)
        g.add_argument("--theta-b-prime", type=float)
        g.add_argument("--theta1", type=float, help="relative angle on a, with theta_a = 0")
        g.add_argument("--theta2", type=float, help="relative angle on b, with theta_b = 0")
        p.add_argument("--variant", default="original",
                       help="original, flip-both, flip-a or flip-b")
        p.add_argument("--zero-tol", type=float)
        p.add_argument("--format", dest="output_format", default="json", choices=("json", "csv"))
        p.add_argument("--output", dest="output_path")

    helps = {
        "construct": "build the unique Hardy state",
        "check": "evaluate the four Hardy conditions",
        "prob": "closed-form contradiction probability (point or diagonal)",
        "scan": "probability surface over [0, 360]^2",
        "slice": "probability along theta1 = theta2",
        "schmidt": "Schmidt decomposition of the Hardy state",
        "optimize": "locate and verify the maxima",
        "lhv": "local deterministic strategies and the logic chain",
        "sample": "Monte-Carlo measurement records",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        common(p)
        p.add_argument("--resolution", type=int, default=optimize.DEFAULT_RESOLUTION)
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--sign", type=int, default=1, choices=(1, -1))
        if name == "prob":
            p.add_argument("--diagonal", type=float, metavar="THETA",
                           help="evaluate on theta1 = theta2 = THETA")
        if name == "optimize":
            p.add_argument("--refine-tol", type=float, default=optimize.DEFAULT_REFINE_TOL,
                           help="bracket width (radians) ending the golden-section search")
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    try:
        variant = HardyVariant.parse(ns.variant)
    except ValueError as exc:
        raise ValidationError(str(exc))
    cfg = RunConfig(
        command=ns.command,
        theta_a=ns.theta_a, theta_a_prime=ns.theta_a_prime,
        theta_b=ns.theta_b, theta_b_prime=ns.theta_b_prime,
        theta1=ns.theta1, theta2=ns.theta2,
        diagonal=getattr(ns, "diagonal", None),
        resolution=ns.resolution, samples=ns.samples, seed=ns.seed,
        variant=variant, output_format=ns.output_format, output_path=ns.output_path,
        zero_tol=ns.zero_tol, sign=ns.sign,
        refine_tol=getattr(ns, "refine_tol", optimize.DEFAULT_REFINE_TOL),
    )
    cfg.validate()
    return cfg


def _setup_dict(setup: MeasurementSetup) -> dict:
    return {
        "theta_a_deg": math.degrees(setup.theta_a),
        "theta_a_prime_deg": math.degrees(setup.theta_a_prime),
        "theta_b_deg": math.degrees(setup.theta_b),
        "theta_b_prime_deg": math.degrees(setup.theta_b_prime),
        "theta1_deg": math.degrees(setup.theta_1),
        "theta2_deg": math.degrees(setup.theta_2),
    }


def _state_dict(state: hardy.TwoQubitState) -> dict:
    names = ("c_pp", "c_pm", "c_mp", "c_mm")
    return {
        "coefficients": dict(zip(names, state.coefficients())),
        "squared": dict(zip(names, state.squared())),
    }


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(x, ".17g") for x in row])
    return buf.getvalue()


def _cmd_construct(cfg, setup):
    state = hardy.construct_state(setup, cfg.sign, cfg.variant)
    return {"setup": _setup_dict(setup), "sign": cfg.sign, "variant": cfg.variant.label,
            **_state_dict(state)}


def _cmd_check(cfg, setup):
    state = hardy.construct_state(setup, cfg.sign, cfg.variant)
    tol = hardy.ZERO_TOL if cfg.zero_tol is None else cfg.zero_tol
    report = hardy.check_conditions(state, setup, cfg.variant, tol)
    return {"setup": _setup_dict(setup), **_state_dict(state), "report": report.to_dict()}


def _cmd_prob(cfg, setup):
    if cfg.diagonal is not None:
        t = normalize_angle(math.radians(cfg.diagonal))
        return {"theta_deg": math.degrees(t), "probability": hardy.probability_diagonal(t)}
    return {"theta1_deg": math.degrees(setup.theta_1), "theta2_deg": math.degrees(setup.theta_2),
            "probability": hardy.probability_closed_form(setup.theta_1, setup.theta_2)}


def _cmd_scan(cfg, setup):
    grid = optimize.scan(cfg.resolution)
    if cfg.output_format == "csv":
        return _csv(("theta1_deg", "theta2_deg", "probability"), grid.rows())
    d1, d2 = grid.degrees()
    return {"resolution": cfg.resolution,
            "theta1_deg": d1.tolist(),
            "theta2_deg": d2.tolist(),
            "probability": grid.values.tolist(),
            "max": float(grid.values.max())}


def _cmd_slice(cfg, setup):
    deg = np.linspace(0.0, 360.0, cfg.resolution)
    values = hardy.probability_diagonal(np.deg2rad(deg))
    if cfg.output_format == "csv":
        return _csv(("theta_deg", "probability"), zip(deg.tolist(), values.tolist()))
    return {"resolution": cfg.resolution, "theta_deg": deg.tolist(),
            "probability": values.tolist()}


def _cmd_schmidt(cfg, setup):
    state = hardy.construct_state(setup, cfg.sign)
    form = schmidt.decompose(state)
    cls = schmidt.classify(form)
    rho_a = schmidt.reduced_density(state, "a")
    rho_b = schmidt.reduced_density(state, "b")
    out = {
        "setup": _setup_dict(setup), **_state_dict(state),
        "rho_a": rho_a.to_rows(), "rho_b": rho_b.to_rows(),
        "lambda_plus": form.lambda_plus, "lambda_minus": form.lambda_minus,
        "sign_pattern": list(form.sign_pattern),
        "degenerate": form.degenerate,
        "class": cls.tag.value, "concurrence_like": cls.concurrence_like,
    }
    if not form.degenerate:
        out["phi_a_deg"] = math.degrees(form.phi_a)
        out["phi_b_deg"] = math.degrees(form.phi_b)
        out["phi_a_minus_theta_a_deg"] = math.degrees(normalize_angle(form.phi_a - setup.theta_a))
        out["phi_b_minus_theta_b_deg"] = math.degrees(normalize_angle(form.phi_b - setup.theta_b))
    return out


def _cmd_optimize(cfg, setup):
    maxima = optimize.find_maxima(cfg.resolution, cfg.refine_tol)
    checks = [optimize.verify_golden(m) for m in maxima]
    diagonal = optimize.find_diagonal_maxima(cfg.resolution, cfg.refine_tol)
    return {
        "resolution": cfg.resolution, "refine_tol": cfg.refine_tol,
        "p_max_exact": hardy.P_MAX,
        "theta0_deg_exact": GOLDEN_ANGLE_DEG,
        "maxima": [c.to_dict() for c in checks],
        "diagonal_maxima": [{"theta_deg": math.degrees(m.theta_1), "p_max": m.p_max}
                            for m in diagonal],
    }


def _cmd_lhv(cfg, setup):
    strategies = nonlocality.enumerate_consistent(cfg.variant)
    bound = nonlocality.lhv_bound(cfg.variant)
    state = hardy.construct_state(setup, cfg.sign, cfg.variant)
    tol = hardy.ZERO_TOL if cfg.zero_tol is None else cfg.zero_tol
    report = hardy.check_conditions(state, setup, cfg.variant, tol)
    chain = nonlocality.logic_chain(report)
    return {
        "variant": cfg.variant.label,
        "setup": _setup_dict(setup),
        "strategies_total": len(nonlocality.all_strategies()),
        "consistent_strategies": [s._asdict() for s in strategies],
        "lhv_bound": bound,
        "quantum_p1d": report.p1d,
        "gap": report.p1d - bound,
        "chain": chain.to_dict(),
    }


def _cmd_sample(cfg, setup):
    state = hardy.construct_state(setup, cfg.sign, cfg.variant)
    stats = nonlocality.sample(state, setup, cfg.samples, cfg.seed,
                               workers=optimize.default_threads())
    report = nonlocality.estimate_report(stats, cfg.zero_tol, cfg.variant)
    exact = nonlocality.outcome_table(state, setup)
    pvals = nonlocality.chi2_pvalues(stats, state, setup)
    return {
        "setup": _setup_dict(setup), "variant": cfg.variant.label,
        **stats.to_dict(),
        "exact": {s: dict(zip(nonlocality.OUTCOME_LABELS, row.tolist()))
                  for s, row in zip(nonlocality.SETTING_LABELS, exact)},
        "chi2_pvalues": dict(zip(nonlocality.SETTING_LABELS, pvals.tolist())),
        "report": report.to_dict(),
    }


HANDLERS = {
    "construct": _cmd_construct, "check": _cmd_check, "prob": _cmd_prob,
    "scan": _cmd_scan, "slice": _cmd_slice, "schmidt": _cmd_schmidt,
    "optimize": _cmd_optimize, "lhv": _cmd_lhv, "sample": _cmd_sample,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        cfg.validate()
        result = HANDLERS[cfg.command](cfg, cfg.setup())
    except ValidationError as exc:
        print(f"hardy-lab: error: {exc}", file=stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as exc:
        print(f"hardy-lab: {cfg.command}: {exc}", file=stderr)
        return EXIT_DOMAIN

    if isinstance(result, dict):
        text = json.dumps({"schema_version": SCHEMA_VERSION, "command": cfg.command, **result},
                          indent=2) + "\n"
    else:
        text = result
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ValidationError as exc:
        print(f"hardy-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
