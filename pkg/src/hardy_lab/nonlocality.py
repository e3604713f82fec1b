"""Local-realism side of the Hardy argument.

Deterministic local strategies (predetermined +-1 values for the four
observables) are the vertices of the local polytope, so the largest
probability a local model can give the positive event subject to the three
zero conditions is the maximum over the consistent vertices. It is 0.

The sampler draws measurement records from the exact quantum distribution
so the contradiction can be checked statistically.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats as sps

from .hardy import (
    HardyReport,
    HardyVariant,
    MeasurementSetup,
    TwoQubitState,
    hardy_conditions,
    make_report,
)
from .spinalg import joint_probability

# setting pairs in sampling order: (primed_a, primed_b)
SETTINGS = ((False, False), (False, True), (True, False), (True, True))
SETTING_LABELS = ("a,b", "a,b'", "a',b", "a',b'")
# outcome pairs in column order
OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))
OUTCOME_LABELS = ("++", "+-", "-+", "--")

BLOCK_SIZE = 1 << 16
SIGMA_RULE = 5.0
MIN_CONFIDENT_TRIALS = 1000


class NotAHardyState(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


class LhvStrategy(NamedTuple):
    """Predetermined outcomes for ``S(theta_a), S(theta_a'), S(theta_b), S(theta_b')``."""

    a: int
    a_prime: int
    b: int
    b_prime: int

    def value_a(self, primed: bool) -> int:
        return self.a_prime if primed else self.a

    def value_b(self, primed: bool) -> int:
        return self.b_prime if primed else self.b

    def satisfies(self, condition) -> bool:
        return (self.value_a(condition.primed_a) == condition.out_a
                and self.value_b(condition.primed_b) == condition.out_b)


def all_strategies() -> list[LhvStrategy]:
    return [LhvStrategy(*v) for v in itertools.product((1, -1), repeat=4)]


def enumerate_consistent(variant: HardyVariant = HardyVariant.ORIGINAL) -> list[LhvStrategy]:
    """Deterministic strategies that never produce any of the three zero events."""
    zero_conditions = hardy_conditions(variant)[:3]
    return [s for s in all_strategies()
            if not any(s.satisfies(c) for c in zero_conditions)]


def lhv_bound(variant: HardyVariant = HardyVariant.ORIGINAL) -> float:
    """Max probability of the positive event over local models obeying the zero conditions."""
    target = hardy_conditions(variant)[3]
    return float(max(s.satisfies(target) for s in enumerate_consistent(variant)))


class ChainStep(NamedTuple):
    condition: str
    statement: str
    probability: float


@dataclass(frozen=True)
class ChainTrace:
    variant: HardyVariant
    steps: tuple[ChainStep, ...]
    magnitude: float

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.label,
            "steps": [s._asdict() for s in self.steps],
            "contradiction_magnitude": self.magnitude,
        }


def _fmt(primed: bool, side: str, out: int) -> str:
    return f"S(theta_{side}{chr(39) if primed else ''})={out:+d}"


def logic_chain(report: HardyReport) -> ChainTrace:
    """The inference from the positive event to a clash with the first zero condition."""
    if not report.holds:
        raise NotAHardyState(
            f"conditions do not hold (p1a={report.p1a:.3g}, p1b={report.p1b:.3g}, "
            f"p1c={report.p1c:.3g}, p1d={report.p1d:.3g}, tol={report.zero_tol:.3g})")
    c1a, c1b, c1c, c1d = hardy_conditions(report.variant)
    a_implied, b_implied = -c1b.out_a, -c1c.out_b
    steps = (
        ChainStep("1d", f"{_fmt(True, 'a', c1d.out_a)} and {_fmt(True, 'b', c1d.out_b)} "
                        "occur together with nonzero probability", report.p1d),
        ChainStep("1c", f"given {_fmt(True, 'a', c1c.out_a)}, local realism fixes "
                        f"{_fmt(False, 'b', b_implied)}", report.p1c),
        ChainStep("1b", f"given {_fmt(True, 'b', c1b.out_b)}, local realism fixes "
                        f"{_fmt(False, 'a', a_implied)}", report.p1b),
        ChainStep("1a", f"so {_fmt(False, 'a', c1a.out_a)} and {_fmt(False, 'b', c1a.out_b)} "
                        "would occur with nonzero probability, but quantum mechanics "
                        "forbids it", report.p1a),
    )
    return ChainTrace(report.variant, steps, report.p1d)


def outcome_table(state: TwoQubitState, setup: MeasurementSetup) -> np.ndarray:
    """4x4 table of exact joint probabilities, rows SETTINGS, columns OUTCOMES."""
    table = np.empty((4, 4))
    for i, (pa, pb) in enumerate(SETTINGS):
        for j, (oa, ob) in enumerate(OUTCOMES):
            table[i, j] = joint_probability(state, setup.direction_a(pa),
                                            setup.direction_b(pb), oa, ob)
    return table


@dataclass(frozen=True)
class SampleStats:
    counts: np.ndarray  # shape (4 settings, 4 outcomes), int64
    n_total: int
    seed: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.n_total:
            raise ValueError("counts do not sum to n_total")

    def trials(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def frequencies(self) -> np.ndarray:
        n = self.trials()[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n > 0, self.counts / np.where(n > 0, n, 1), np.nan)

    def to_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "seed": self.seed,
            "counts": {s: dict(zip(OUTCOME_LABELS, (int(x) for x in row)))
                       for s, row in zip(SETTING_LABELS, self.counts)},
        }


def block_seed(seed: int, block: int) -> np.random.SeedSequence:
    """Seed of block ``block``: ``SeedSequence(seed, spawn_key=(block,))``."""
    return np.random.SeedSequence(seed, spawn_key=(block,))


def _sample_block(cdf: np.ndarray, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(block_seed(seed, block)))
    setting = rng.integers(0, 4, size=size)
    u = rng.random(size)
    # outcome = first index whose cumulative probability exceeds u;
    # zero-probability outcomes have an empty interval and are never drawn
    outcome = (u[:, None] >= cdf[setting]).sum(axis=1)
    np.minimum(outcome, 3, out=outcome)
    counts = np.zeros((4, 4), dtype=np.int64)
    np.add.at(counts, (setting, outcome), 1)
    return counts


def sample(state: TwoQubitState, setup: MeasurementSetup, n: int, seed: int,
           workers: int = 1) -> SampleStats:
    """Simulate ``n`` runs: uniform setting pair, then an exact quantum outcome pair.

    Trials are generated in blocks of ``BLOCK_SIZE``; block ``k`` uses a
    PCG64 generator seeded by :func:`block_seed`. Counts therefore do not
    depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    table = outcome_table(state, setup)
    cdf = np.cumsum(table, axis=1)
    cdf[:, -1] = np.inf
    n_blocks = -(-n // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, n - k * BLOCK_SIZE) for k in range(n_blocks)]
    jobs = [(cdf, seed, k, sizes[k]) for k in range(n_blocks)]
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _sample_block(*j), jobs))
    else:
        parts = [_sample_block(*j) for j in jobs]
    counts = np.sum(parts, axis=0)
    return SampleStats(counts, n, seed)


def estimate_report(stats: SampleStats, zero_tol: float | None = None,
                    variant: HardyVariant = HardyVariant.ORIGINAL) -> HardyReport:
    """Empirical Hardy report.

    Without an explicit ``zero_tol`` the tolerance is five worst-case binomial
    standard deviations, ``5 * 0.5 / sqrt(n_min)``, with ``n_min`` the
    smallest number of trials in any setting pair.
    """
    trials = stats.trials()
    if np.any(trials == 0):
        missing = [SETTING_LABELS[i] for i in np.flatnonzero(trials == 0)]
        raise InsufficientSamples(f"no trials for setting pair(s): {', '.join(missing)}")
    n_min = int(trials.min())
    if zero_tol is None:
        zero_tol = SIGMA_RULE * 0.5 / math.sqrt(n_min)
    freq = stats.frequencies()
    probs = []
    for c in hardy_conditions(variant):
        i = SETTINGS.index((c.primed_a, c.primed_b))
        j = OUTCOMES.index((c.out_a, c.out_b))
        probs.append(freq[i, j])
    return make_report(probs, zero_tol, variant, low_confidence=n_min < MIN_CONFIDENT_TRIALS)


def chi2_pvalues(stats: SampleStats, state: TwoQubitState,
                 setup: MeasurementSetup) -> np.ndarray:
    """Per-setting chi-square goodness-of-fit p-values against the exact distribution.

    Outcomes with zero exact probability are excluded from the test and
    must have zero counts; otherwise the p-value is 0.
    """
    table = outcome_table(state, setup)
    out = np.empty(4)
    for i in range(4):
        n = stats.counts[i].sum()
        live = table[i] > 0.0
        if np.any(stats.counts[i][~live] > 0):
            out[i] = 0.0
            continue
        expected = n * table[i][live] / table[i][live].sum()
        if live.sum() < 2:
            out[i] = 1.0
            continue
        out[i] = sps.chisquare(stats.counts[i][live], expected).pvalue
    return out
