"""Real-amplitude spin-1/2 algebra for directions in the x-z plane.

Angles are radians, measured from the z axis. A spin vector is always
expressed in the eigenbasis of some reference direction ``theta_ref``;
the rotation that takes that basis to the eigenbasis of ``theta`` is the
half-angle matrix

    |S(theta)=+1> =  cos(d/2) |+> + sin(d/2) |->
    |S(theta)=-1> = -sin(d/2) |+> + cos(d/2) |->

with ``d = theta - theta_ref`` and ``|+>, |->`` the reference eigenvectors.
"""

from __future__ import annotations

import math
from typing import NamedTuple

Angle = float

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-12
DEGENERACY_TOL = 1e-12


def normalize_angle(theta: Angle) -> Angle:
    """Map ``theta`` into ``[0, 2*pi)``."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    r = math.fmod(theta, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if r >= TWO_PI else r


class SpinVector(NamedTuple):
    """Amplitudes along the (+1, -1) eigenvectors of a reference direction."""

    up: float
    down: float

    def norm(self) -> float:
        return math.hypot(self.up, self.down)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.up * self.up + self.down * self.down - 1.0) <= tol


class SymMatrix2(NamedTuple):
    """Real symmetric 2x2 matrix ``[[a11, a12], [a12, a22]]``."""

    a11: float
    a12: float
    a22: float

    def trace(self) -> float:
        return self.a11 + self.a22

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def matvec(self, v: SpinVector) -> SpinVector:
        return SpinVector(self.a11 * v.up + self.a12 * v.down,
                          self.a12 * v.up + self.a22 * v.down)

    def to_rows(self) -> list[list[float]]:
        return [[self.a11, self.a12], [self.a12, self.a22]]


class Eigen2(NamedTuple):
    lambda_plus: float
    lambda_minus: float
    v_plus: SpinVector
    v_minus: SpinVector
    degenerate: bool


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def eigenvector(theta_ref: Angle, theta: Angle, sign: int) -> SpinVector:
    """Return ``|S(theta)=sign>`` in the eigenbasis of ``S(theta_ref)``."""
    _check_sign(sign)
    half = 0.5 * (theta - theta_ref)
    c, s = math.cos(half), math.sin(half)
    if sign == 1:
        return SpinVector(c, s)
    return SpinVector(-s, c)


def overlap(u: SpinVector, v: SpinVector) -> float:
    return u.up * v.up + u.down * v.down


def amplitude(coeffs, u: SpinVector, v: SpinVector) -> float:
    """Contract a 2x2 coefficient table ``coeffs[i][j]`` with ``u (x) v``.

    Index 0 is the +1 label, index 1 the -1 label, for both particles.
    """
    (cpp, cpm), (cmp_, cmm) = coeffs
    return (u.up * (cpp * v.up + cpm * v.down)
            + u.down * (cmp_ * v.up + cmm * v.down))


def joint_probability(state, dir_a: Angle, dir_b: Angle,
                      out_a: int, out_b: int) -> float:
    """Probability that ``S(dir_a)`` gives ``out_a`` and ``S(dir_b)`` gives ``out_b``.

    ``state`` is any object with ``coefficient_table()`` and basis labels
    ``theta_a``/``theta_b`` (see :class:`hardy_lab.hardy.TwoQubitState`).
    """
    u = eigenvector(state.theta_a, dir_a, out_a)
    v = eigenvector(state.theta_b, dir_b, out_b)
    amp = amplitude(state.coefficient_table(), u, v)
    return amp * amp


def eig_sym2(m: SymMatrix2, degeneracy_tol: float = DEGENERACY_TOL) -> Eigen2:
    """Closed-form eigen-decomposition of a real symmetric 2x2 matrix.

    Eigenvalues are ordered ``lambda_plus >= lambda_minus``. When the gap is
    below ``degeneracy_tol`` the standard basis is returned with
    ``degenerate=True``.
    """
    a, b, d = m
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), b)
    # compute the large-magnitude root directly, the other from det / root
    if mean >= 0.0:
        lam_p = mean + radius
        lam_m = m.det() / lam_p if lam_p != 0.0 else 0.0
    else:
        lam_m = mean - radius
        lam_p = m.det() / lam_m

    if 2.0 * radius <= degeneracy_tol:
        return Eigen2(lam_p, lam_m, SpinVector(1.0, 0.0), SpinVector(0.0, 1.0), True)

    # two candidate null vectors of (m - lam_p); take the better-conditioned one
    x1, y1 = b, lam_p - a
    x2, y2 = lam_p - d, b
    if math.hypot(x1, y1) >= math.hypot(x2, y2):
        x, y = x1, y1
    else:
        x, y = x2, y2
    n = math.hypot(x, y)
    vp = SpinVector(x / n, y / n)
    vm = SpinVector(-vp.down, vp.up)
    return Eigen2(lam_p, lam_m, vp, vm, False)
