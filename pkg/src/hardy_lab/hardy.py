"""Unique Hardy state for a measurement setup, condition checks, closed forms.

A setup fixes two directions per particle. Writing the state in the
product eigenbasis of ``S(theta_a) x S(theta_b)``, the three zero conditions
are linear in the four coefficients, so the state is fixed up to a sign.
The probability of the fourth (positive) event depends only on the
relative angles ``theta_1 = theta_a' - theta_a`` and
``theta_2 = theta_b' - theta_b``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spinalg import (
    NORM_TOL,
    Angle,
    eigenvector,
    joint_probability,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
# cos^2(theta_0 / 2) = 1 / golden
GOLDEN_ANGLE = 2.0 * math.acos(GOLDEN ** -0.5)
P_MAX = GOLDEN ** -5

ZERO_TOL = 1e-10
DEGENERACY_TOL = 1e-9


class DegenerateSetup(ValueError):
    """A relative angle is a multiple of pi: one side's observables commute."""

    def __init__(self, side: str, theta: float):
        self.side = side
        self.theta = theta
        which = "theta_1 (particle a)" if side == "a" else "theta_2 (particle b)"
        super().__init__(
            f"degenerate setup: {which} = {math.degrees(theta):.6g} deg is a "
            f"multiple of 180 deg, so S(theta_{side}) and S(theta_{side}') commute"
        )


class HardyVariant(enum.Enum):
    """The four outcome relabelings that all give a Hardy-type argument.

    Each value is ``(sign_a, sign_b)``: the factor applied to particle a and
    particle b outcomes in every condition of the original set.
    """

    ORIGINAL = (1, 1)
    FLIP_BOTH = (-1, -1)
    FLIP_A = (-1, 1)
    FLIP_B = (1, -1)

    @property
    def sign_a(self) -> int:
        return self.value[0]

    @property
    def sign_b(self) -> int:
        return self.value[1]

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def parse(cls, text: str) -> "HardyVariant":
        key = text.strip().lower().replace("-", "_")
        for v in cls:
            if v.name.lower() == key:
                return v
        raise ValueError(f"unknown variant {text!r}; choose from "
                         + ", ".join(v.label for v in cls))


class Condition(NamedTuple):
    """One joint event: which setting on each side (primed or not) and the outcomes."""

    name: str
    primed_a: bool
    primed_b: bool
    out_a: int
    out_b: int


# three zero conditions followed by the positive one
_ORIGINAL_CONDITIONS = (
    Condition("1a", False, False, +1, +1),
    Condition("1b", False, True, -1, -1),
    Condition("1c", True, False, -1, -1),
    Condition("1d", True, True, -1, -1),
)


def hardy_conditions(variant: HardyVariant = HardyVariant.ORIGINAL) -> tuple[Condition, ...]:
    sa, sb = variant.value
    return tuple(c._replace(out_a=sa * c.out_a, out_b=sb * c.out_b)
                 for c in _ORIGINAL_CONDITIONS)


@dataclass(frozen=True)
class MeasurementSetup:
    theta_a: Angle
    theta_a_prime: Angle
    theta_b: Angle
    theta_b_prime: Angle

    def __post_init__(self):
        for name in ("theta_a", "theta_a_prime", "theta_b", "theta_b_prime"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def from_relative(cls, theta_1: Angle, theta_2: Angle,
                      theta_a: Angle = 0.0, theta_b: Angle = 0.0) -> "MeasurementSetup":
        return cls(theta_a, theta_a + theta_1, theta_b, theta_b + theta_2)

    @property
    def theta_1(self) -> Angle:
        return self.theta_a_prime - self.theta_a

    @property
    def theta_2(self) -> Angle:
        return self.theta_b_prime - self.theta_b

    def direction_a(self, primed: bool) -> Angle:
        return self.theta_a_prime if primed else self.theta_a

    def direction_b(self, primed: bool) -> Angle:
        return self.theta_b_prime if primed else self.theta_b


@dataclass(frozen=True)
class TwoQubitState:
    """Real pure state ``sum c_ij |S(theta_a)=i> |S(theta_b)=j>``."""

    c_pp: float
    c_pm: float
    c_mp: float
    c_mm: float
    theta_a: Angle = 0.0
    theta_b: Angle = 0.0

    def __post_init__(self):
        n2 = self.norm_squared()
        if not math.isfinite(n2) or abs(n2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum of squares = {n2!r}")

    @classmethod
    def normalized(cls, c_pp, c_pm, c_mp, c_mm, theta_a=0.0, theta_b=0.0) -> "TwoQubitState":
        n = math.sqrt(c_pp * c_pp + c_pm * c_pm + c_mp * c_mp + c_mm * c_mm)
        if n == 0.0:
            raise ValueError("zero vector cannot be normalized")
        return cls(c_pp / n, c_pm / n, c_mp / n, c_mm / n, theta_a, theta_b)

    def norm_squared(self) -> float:
        return self.c_pp ** 2 + self.c_pm ** 2 + self.c_mp ** 2 + self.c_mm ** 2

    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.c_pp, self.c_pm, self.c_mp, self.c_mm)

    def squared(self) -> tuple[float, float, float, float]:
        return tuple(c * c for c in self.coefficients())

    def coefficient_table(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.c_pp, self.c_pm), (self.c_mp, self.c_mm))

    def flipped(self, flip_a: bool, flip_b: bool) -> "TwoQubitState":
        """Rotate particle a and/or b by pi in the x-z plane.

        A pi rotation maps ``S(theta)`` to ``-S(theta)`` for every direction,
        so every outcome on that side is relabeled +1 <-> -1.
        """
        (pp, pm), (mp, mm) = self.coefficient_table()
        if flip_a:
            # |+> -> |->, |-> -> -|+>
            pp, pm, mp, mm = -mp, -mm, pp, pm
        if flip_b:
            pp, pm, mp, mm = -pm, pp, -mm, mp
        return TwoQubitState(pp, pm, mp, mm, self.theta_a, self.theta_b)


@dataclass(frozen=True)
class HardyReport:
    p1a: float
    p1b: float
    p1c: float
    p1d: float
    zero_tol: float
    holds: bool
    variant: HardyVariant = HardyVariant.ORIGINAL
    low_confidence: bool = False

    @property
    def zero_probabilities(self) -> tuple[float, float, float]:
        return (self.p1a, self.p1b, self.p1c)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.label,
            "p1a": self.p1a, "p1b": self.p1b, "p1c": self.p1c, "p1d": self.p1d,
            "zero_tol": self.zero_tol,
            "holds": self.holds,
            "low_confidence": self.low_confidence,
        }


def make_report(probs, zero_tol: float, variant: HardyVariant,
                low_confidence: bool = False) -> HardyReport:
    p1a, p1b, p1c, p1d = (float(p) for p in probs)
    holds = max(p1a, p1b, p1c) <= zero_tol and p1d > zero_tol
    return HardyReport(p1a, p1b, p1c, p1d, zero_tol, holds, variant, low_confidence)


def _is_multiple_of_pi(theta: float, tol: float = DEGENERACY_TOL) -> bool:
    return abs(math.remainder(theta, math.pi)) <= tol


def check_degenerate(setup: MeasurementSetup, tol: float = DEGENERACY_TOL) -> None:
    if _is_multiple_of_pi(setup.theta_1, tol):
        raise DegenerateSetup("a", setup.theta_1)
    if _is_multiple_of_pi(setup.theta_2, tol):
        raise DegenerateSetup("b", setup.theta_2)


def construct_state(setup: MeasurementSetup, sign: int = 1,
                    variant: HardyVariant = HardyVariant.ORIGINAL) -> TwoQubitState:
    """Build the unique state satisfying the Hardy conditions for ``setup``.

    Uses the tan-free form: with ``s_k = sin(theta_k/2)`` and
    ``c_k = cos(theta_k/2)`` the unnormalized coefficients are
    ``c_-+ = s1 c2``, ``c_+- = c1 s2``, ``c_-- = s1 s2``, ``c_++ = 0``.
    For a non-original ``variant`` the state is pi-rotated on the flipped side(s).
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    check_degenerate(setup)
    h1, h2 = 0.5 * setup.theta_1, 0.5 * setup.theta_2
    s1, c1 = math.sin(h1), math.cos(h1)
    s2, c2 = math.sin(h2), math.cos(h2)
    mp, pm, mm = s1 * c2, c1 * s2, s1 * s2
    k = sign / math.sqrt(mp * mp + pm * pm + mm * mm)
    state = TwoQubitState(0.0, k * pm, k * mp, k * mm, setup.theta_a, setup.theta_b)
    if variant is not HardyVariant.ORIGINAL:
        state = state.flipped(variant.sign_a < 0, variant.sign_b < 0)
    return state


def condition_probabilities(state: TwoQubitState, setup: MeasurementSetup,
                            variant: HardyVariant = HardyVariant.ORIGINAL) -> tuple[float, ...]:
    return tuple(
        joint_probability(state, setup.direction_a(c.primed_a), setup.direction_b(c.primed_b),
                          c.out_a, c.out_b)
        for c in hardy_conditions(variant)
    )


def check_conditions(state: TwoQubitState, setup: MeasurementSetup,
                     variant: HardyVariant = HardyVariant.ORIGINAL,
                     zero_tol: float = ZERO_TOL) -> HardyReport:
    probs = condition_probabilities(state, setup, variant)
    return make_report(probs, zero_tol, variant)


def probability_closed_form(theta_1, theta_2):
    """Probability of the positive Hardy event for the constructed state.

    Equal to ``sin^2(t1/2) sin^2(t2/2) / (tan^2(t1/2) + tan^2(t2/2) + tan^2 tan^2)``
    but cleared of tangents so it is finite for all angles; defined as 0
    where the denominator vanishes. Accepts scalars or numpy arrays.
    """
    t1 = np.asarray(theta_1, dtype=float)
    t2 = np.asarray(theta_2, dtype=float)
    s1, c1 = np.sin(0.5 * t1), np.cos(0.5 * t1)
    s2, c2 = np.sin(0.5 * t2), np.cos(0.5 * t2)
    ss1, cc1, ss2, cc2 = s1 * s1, c1 * c1, s2 * s2, c2 * c2
    den = ss1 * cc2 + cc1 * ss2 + ss1 * ss2
    num = ss1 * ss2 * cc1 * cc2
    safe = np.where(den > 0.0, den, 1.0)
    out = np.where(den > 0.0, num / safe, 0.0)
    return float(out) if out.ndim == 0 else out


def probability_diagonal(theta):
    """Closed-form probability on the slice ``theta_1 = theta_2 = theta``.

    ``sin^2(theta) / (4 + 4 sec^2(theta/2))`` multiplied through by
    ``cos^2(theta/2)``.
    """
    t = np.asarray(theta, dtype=float)
    cc = np.cos(0.5 * t) ** 2
    out = np.sin(t) ** 2 * cc / (4.0 * (cc + 1.0))
    return float(out) if out.ndim == 0 else out


def diagonal_coefficients(theta: Angle) -> tuple[float, float, float]:
    """``(c_-+, c_+-, c_--)`` of the constructed state when ``theta_1 = theta_2``."""
    if _is_multiple_of_pi(theta):
        raise DegenerateSetup("a", theta)
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    r = math.sqrt(1.0 + c * c)
    off = math.copysign(1.0, s) * c / r
    return off, off, abs(s) / r


class UniqueSolution(NamedTuple):
    dimension: int
    state: TwoQubitState
    null_basis: tuple[tuple[float, float, float, float], ...]


def constraint_matrix(setup: MeasurementSetup,
                      variant: HardyVariant = HardyVariant.ORIGINAL) -> np.ndarray:
    """Rows are the amplitude functionals of the three zero conditions.

    Columns follow ``(c_++, c_+-, c_-+, c_--)`` in the ``(theta_a, theta_b)`` basis.
    """
    rows = []
    for c in hardy_conditions(variant)[:3]:
        u = eigenvector(setup.theta_a, setup.direction_a(c.primed_a), c.out_a)
        v = eigenvector(setup.theta_b, setup.direction_b(c.primed_b), c.out_b)
        rows.append([u.up * v.up, u.up * v.down, u.down * v.up, u.down * v.down])
    return np.array(rows)


def solve_unique(setup: MeasurementSetup,
                 variant: HardyVariant = HardyVariant.ORIGINAL,
                 rank_tol: float = DEGENERACY_TOL) -> UniqueSolution:
    """Solve the homogeneous zero-condition system and report its null dimension.

    The returned state is the first null vector, normalized, with its
    largest-magnitude component made positive.
    """
    m = constraint_matrix(setup, variant)
    _, sv, vt = np.linalg.svd(m)
    rank = int(np.sum(sv > rank_tol * max(1.0, sv[0])))
    null = vt[rank:]
    basis = []
    for row in null:
        row = row / np.linalg.norm(row)
        if row[np.argmax(np.abs(row))] < 0:
            row = -row
        basis.append(tuple(float(x) for x in row))
    state = TwoQubitState.normalized(*basis[0], setup.theta_a, setup.theta_b)
    return UniqueSolution(len(basis), state, tuple(basis))
