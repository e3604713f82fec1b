"""Scanning and maximizing the Hardy probability surface.

Maxima are found numerically (coarse grid, then coordinate golden-section
refinement) and then checked against the golden-ratio characterization
``cos^2(theta/2) = 1/golden`` on both sides.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hardy import GOLDEN, MeasurementSetup, probability_closed_form, probability_diagonal
from .spinalg import TWO_PI, Angle, eigenvector, overlap

THREADS_ENV = "HARDY_LAB_THREADS"
INV_GOLDEN = 1.0 / GOLDEN
MERGE_DISTANCE = math.radians(1.0)
GOLDEN_STRICT_TOL = 1e-6
GOLDEN_FAIL_TOL = 1e-4
DEFAULT_RESOLUTION = 361
DEFAULT_REFINE_TOL = 1e-7


class NotGolden(ValueError):
    pass


@dataclass(frozen=True)
class GridScan:
    theta_1_axis: np.ndarray
    theta_2_axis: np.ndarray
    values: np.ndarray  # values[i, j] = P(theta_1_axis[i], theta_2_axis[j])
    axis_deg: np.ndarray | None = None

    def __post_init__(self):
        if self.values.shape != (len(self.theta_1_axis), len(self.theta_2_axis)):
            raise ValueError("values shape does not match axes")

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        if self.axis_deg is not None:
            return self.axis_deg, self.axis_deg
        return np.degrees(self.theta_1_axis), np.degrees(self.theta_2_axis)

    def rows(self):
        """Long format ``(theta1_deg, theta2_deg, probability)`` in row-major order."""
        d1, d2 = self.degrees()
        for i, a in enumerate(d1):
            for j, b in enumerate(d2):
                yield float(a), float(b), float(self.values[i, j])


@dataclass(frozen=True)
class Optimum:
    theta_1: Angle
    theta_2: Angle
    p_max: float
    seed_value: float = field(default=float("nan"), compare=False)

    def to_dict(self) -> dict:
        return {
            "theta1_deg": math.degrees(self.theta_1),
            "theta2_deg": math.degrees(self.theta_2),
            "p_max": self.p_max,
        }


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return min(8, os.cpu_count() or 1)


def scan(resolution: int, threads: int | None = None) -> GridScan:
    """Evaluate the closed-form probability on a uniform grid over ``[0, 2pi]^2``.

    Both endpoints are included. Rows are split across ``threads`` workers;
    each cell is an independent elementwise evaluation, so the result does
    not depend on the split.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    axis_deg = np.linspace(0.0, 360.0, resolution)
    axis = np.deg2rad(axis_deg)
    if threads is None:
        threads = default_threads()
    threads = max(1, min(threads, resolution))
    if threads == 1 or resolution < 128:
        values = probability_closed_form(axis[:, None], axis[None, :])
    else:
        chunks = np.array_split(np.arange(resolution), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda rows: probability_closed_form(axis[rows, None], axis[None, :]), chunks))
        values = np.vstack(parts)
    return GridScan(axis, axis.copy(), np.asarray(values), axis_deg)


def golden_section_max(f, lo: float, hi: float, tol: float) -> float:
    """Argmax of ``f`` on ``[lo, hi]``, assuming a single peak in the bracket."""
    r = INV_GOLDEN
    a, b = lo, hi
    c = b - r * (b - a)
    d = a + r * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    return c if fc >= fd else d


def _periodic_local_maxima(values: np.ndarray) -> list[tuple[int, int]]:
    # drop the duplicated 2*pi row/column so the grid wraps cleanly
    v = values[:-1, :-1]
    is_max = v > 0.0
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_max &= v >= np.roll(np.roll(v, di, axis=0), dj, axis=1)
    return [tuple(int(k) for k in ij) for ij in np.argwhere(is_max)]


def _refine(f, x: float, y: float, half_width: float, tol: float,
            max_sweeps: int = 200) -> tuple[float, float, float]:
    best = f(x, y)
    for _ in range(max_sweeps):
        x0, y0, start = x, y, best
        xn = golden_section_max(lambda t: f(t, y), x - half_width, x + half_width, tol)
        if (fx := f(xn, y)) >= best:
            x, best = xn, fx
        yn = golden_section_max(lambda t: f(x, t), y - half_width, y + half_width, tol)
        if (fy := f(x, yn)) >= best:
            y, best = yn, fy
        # stop on convergence, or once rounding noise stops any real gain
        if max(abs(x - x0), abs(y - y0)) < tol or best <= start:
            break
    return x, y, best


def _dedupe(points: list[Optimum]) -> list[Optimum]:
    kept: list[Optimum] = []
    for p in sorted(points, key=lambda o: -o.p_max):
        if all(_periodic_distance(p, k) >= MERGE_DISTANCE for k in kept):
            kept.append(p)
    return sorted(kept, key=lambda o: (o.theta_1, o.theta_2))


def _periodic_distance(p: Optimum, q: Optimum) -> float:
    d1 = abs(math.remainder(p.theta_1 - q.theta_1, TWO_PI))
    d2 = abs(math.remainder(p.theta_2 - q.theta_2, TWO_PI))
    return math.hypot(d1, d2)


def _wrap(theta: float) -> float:
    r = math.fmod(theta, TWO_PI)
    return r + TWO_PI if r < 0 else r


def find_maxima(coarse_resolution: int = DEFAULT_RESOLUTION,
                refine_tol: float = DEFAULT_REFINE_TOL,
                threads: int | None = None) -> list[Optimum]:
    """Local maxima of the probability surface over ``[0, 2pi)^2``.

    Grid local maxima (periodic neighbourhood) seed a coordinate-wise
    golden-section ascent confined to one grid step around the current
    point; results closer than 1 degree are merged.
    """
    if coarse_resolution < 16:
        raise ValueError("coarse_resolution must be >= 16")
    if refine_tol <= 0:
        raise ValueError("refine_tol must be positive")
    grid = scan(coarse_resolution, threads)
    step = grid.theta_1_axis[1] - grid.theta_1_axis[0]
    found = []
    for i, j in _periodic_local_maxima(grid.values):
        x0, y0 = grid.theta_1_axis[i], grid.theta_2_axis[j]
        seed_value = float(grid.values[i, j])
        x, y, p = _refine(probability_closed_form, x0, y0, step, refine_tol)
        x, y = _wrap(x), _wrap(y)
        found.append(Optimum(x, y, float(probability_closed_form(x, y)), seed_value))
    return _dedupe(found)


def find_diagonal_maxima(coarse_resolution: int = DEFAULT_RESOLUTION,
                         refine_tol: float = DEFAULT_REFINE_TOL) -> list[Optimum]:
    """Maxima restricted to ``theta_1 = theta_2``."""
    if coarse_resolution < 16:
        raise ValueError("coarse_resolution must be >= 16")
    axis = np.linspace(0.0, TWO_PI, coarse_resolution)
    v = probability_diagonal(axis)[:-1]
    step = axis[1] - axis[0]
    peaks = np.flatnonzero((v > 0) & (v >= np.roll(v, 1)) & (v >= np.roll(v, -1)))
    found = []
    for k in peaks:
        t = golden_section_max(probability_diagonal, axis[k] - step, axis[k] + step, refine_tol)
        p = float(probability_diagonal(t))
        if p < v[k]:
            t, p = float(axis[k]), float(v[k])
        t = _wrap(t)
        found.append(Optimum(t, t, p, float(v[k])))
    return _dedupe(found)


@dataclass(frozen=True)
class GoldenCheck:
    optimum: Optimum
    cos2_half: tuple[float, float]
    sin2_half: tuple[float, float]
    overlaps: dict  # name -> (value_a, value_b, target)
    deviations: dict
    identity_residual: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())

    @property
    def strict(self) -> bool:
        return self.max_deviation <= GOLDEN_STRICT_TOL

    def to_dict(self) -> dict:
        return {
            "optimum": self.optimum.to_dict(),
            "cos2_half": list(self.cos2_half),
            "sin2_half": list(self.sin2_half),
            "overlaps": {k: {"a": v[0], "b": v[1], "target": v[2]}
                         for k, v in self.overlaps.items()},
            "max_deviation": self.max_deviation,
            "identity_residual": self.identity_residual,
        }


def verify_golden(optimum: Optimum) -> GoldenCheck:
    """Check an optimum against the golden-ratio conditions on the overlaps.

    Raises :class:`NotGolden` when any quantity is off by more than 1e-4.
    """
    setup = MeasurementSetup.from_relative(optimum.theta_1, optimum.theta_2)
    cos2 = tuple(math.cos(0.5 * t) ** 2 for t in (optimum.theta_1, optimum.theta_2))
    sin2 = tuple(math.sin(0.5 * t) ** 2 for t in (optimum.theta_1, optimum.theta_2))

    def ov2(side: str, primed_out: int, plain_out: int) -> float:
        if side == "a":
            ref, p, q = setup.theta_a, setup.theta_a_prime, setup.theta_a
        else:
            ref, p, q = setup.theta_b, setup.theta_b_prime, setup.theta_b
        return overlap(eigenvector(ref, p, primed_out), eigenvector(ref, q, plain_out)) ** 2

    targets = {
        "primed_minus_vs_minus": (-1, -1, INV_GOLDEN),
        "primed_minus_vs_plus": (-1, 1, 1.0 - INV_GOLDEN),
        "primed_plus_vs_minus": (1, -1, 1.0 - INV_GOLDEN),
        "primed_plus_vs_plus": (1, 1, INV_GOLDEN),
    }
    overlaps = {name: (ov2("a", po, qo), ov2("b", po, qo), tgt)
                for name, (po, qo, tgt) in targets.items()}
    deviations = {
        "cos2_half_a": abs(cos2[0] - INV_GOLDEN),
        "cos2_half_b": abs(cos2[1] - INV_GOLDEN),
        "sin2_half_a": abs(sin2[0] - (1.0 - INV_GOLDEN)),
        "sin2_half_b": abs(sin2[1] - (1.0 - INV_GOLDEN)),
    }
    for name, (va, vb, tgt) in overlaps.items():
        deviations[name + "_a"] = abs(va - tgt)
        deviations[name + "_b"] = abs(vb - tgt)
    identity = 2.0 / GOLDEN ** 2 + 1.0 / GOLDEN ** 3 - 1.0
    check = GoldenCheck(optimum, cos2, sin2, overlaps, deviations, identity)
    if check.max_deviation > GOLDEN_FAIL_TOL:
        worst = max(deviations, key=deviations.get)
        raise NotGolden(f"optimum at ({math.degrees(optimum.theta_1):.4f}, "
                        f"{math.degrees(optimum.theta_2):.4f}) deg is not golden: "
                        f"{worst} off by {deviations[worst]:.3g}")
    return check
