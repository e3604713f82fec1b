"""Schmidt decomposition of real two-qubit states.

Any real state can be written ``c+ |S(phi_a)=+1>|S(phi_b)=+1> + c- |S(phi_a)=-1>|S(phi_b)=-1>``
with ``c+^2 = lambda_+ >= c-^2 = lambda_-`` the eigenvalues of either
reduced density matrix. For the Hardy state ``c_++ = 0`` which forces
``lambda_+ != lambda_-`` whenever the other three coefficients are nonzero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .hardy import GOLDEN, MeasurementSetup, TwoQubitState
from .spinalg import (
    DEGENERACY_TOL,
    Angle,
    SymMatrix2,
    amplitude,
    eig_sym2,
    eigenvector,
    normalize_angle,
)

CLASSIFY_TOL = 1e-12
PRODUCT_TOL = 1e-12


def reduced_density(state: TwoQubitState, side: str) -> SymMatrix2:
    """Partial trace of ``|state><state|`` in the ``(theta_a, theta_b)`` basis.

    With ``C`` the 2x2 coefficient table, ``rho_a = C C^T`` and ``rho_b = C^T C``.
    """
    (pp, pm), (mp, mm) = state.coefficient_table()
    if side in ("a", "A"):
        return SymMatrix2(pp * pp + pm * pm, pp * mp + pm * mm, mp * mp + mm * mm)
    if side in ("b", "B"):
        return SymMatrix2(pp * pp + mp * mp, pp * pm + mp * mm, pm * pm + mm * mm)
    raise ValueError(f"side must be 'a' or 'b', got {side!r}")


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data in terms of measurement-axis angles.

    ``sign_pattern`` carries the signs of ``(c+, c-)`` so the state is
    reproduced exactly by :meth:`reconstruct`. When ``degenerate`` is set the
    axes are not unique and ``phi_a``/``phi_b`` are ``None``.
    """

    lambda_plus: float
    lambda_minus: float
    phi_a: Angle | None
    phi_b: Angle | None
    sign_pattern: tuple[int, int]
    theta_a: Angle = 0.0
    theta_b: Angle = 0.0
    degenerate: bool = False
    c_pm: float | None = None
    c_mp: float | None = None

    @property
    def c_plus(self) -> float:
        return self.sign_pattern[0] * math.sqrt(max(self.lambda_plus, 0.0))

    @property
    def c_minus(self) -> float:
        return self.sign_pattern[1] * math.sqrt(max(self.lambda_minus, 0.0))

    def reconstruct(self) -> TwoQubitState:
        if self.degenerate:
            raise ValueError("degenerate Schmidt form has no unique axes to rebuild from")
        table = _table_from_axes(self.phi_a, self.phi_b, self.c_plus, self.c_minus,
                                 self.theta_a, self.theta_b)
        (pp, pm), (mp, mm) = table
        return TwoQubitState.normalized(pp, pm, mp, mm, self.theta_a, self.theta_b)


def _table_from_axes(phi_a, phi_b, c_plus, c_minus, theta_a, theta_b):
    up_a = eigenvector(theta_a, phi_a, 1)
    dn_a = eigenvector(theta_a, phi_a, -1)
    up_b = eigenvector(theta_b, phi_b, 1)
    dn_b = eigenvector(theta_b, phi_b, -1)
    return tuple(
        tuple(c_plus * ua * ub + c_minus * da * db
              for ub, db in ((up_b.up, dn_b.up), (up_b.down, dn_b.down)))
        for ua, da in ((up_a.up, dn_a.up), (up_a.down, dn_a.down))
    )


def _axis_candidates(theta_ref: Angle, f: float, g: float) -> tuple[Angle, Angle]:
    # |S(phi)=+1> = (cos(e/2), sin(e/2)) with e = phi - theta_ref. The first
    # component fixes |e| = 2 arccos f only; atan2 gives the same value without
    # the loss of precision near f = +-1.
    e = 2.0 * math.atan2(abs(g), f)
    return normalize_angle(theta_ref + e), normalize_angle(theta_ref - e)


def decompose(state: TwoQubitState, degeneracy_tol: float = DEGENERACY_TOL) -> SchmidtForm:
    """Schmidt eigenvalues and axis angles of ``state``.

    Each axis angle comes from the leading eigenvector ``(f, g)`` of the
    corresponding reduced matrix as ``phi = theta +- 2 arccos f``. All four
    branch combinations are rebuilt and the one closest to ``state`` wins;
    ties go to the ``+`` branch on each side.
    """
    rho_a = reduced_density(state, "a")
    eig = eig_sym2(rho_a, degeneracy_tol)
    lam_p, lam_m = eig.lambda_plus, max(eig.lambda_minus, 0.0)
    coeffs = state.coefficient_table()
    extra = {}
    if state.c_pp == 0.0:
        extra = {"c_pm": state.c_pm, "c_mp": state.c_mp}
    if eig.degenerate:
        return SchmidtForm(lam_p, lam_m, None, None, (1, 1), state.theta_a, state.theta_b,
                           True, **extra)

    # partner axis on b: w+ is proportional to C^T u+
    u = eig.v_plus
    wx = coeffs[0][0] * u.up + coeffs[1][0] * u.down
    wy = coeffs[0][1] * u.up + coeffs[1][1] * u.down
    wn = math.hypot(wx, wy)
    cands_a = _axis_candidates(state.theta_a, u.up, u.down)
    cands_b = _axis_candidates(state.theta_b, wx / wn, wy / wn)

    best = None
    for phi_a in cands_a:
        for phi_b in cands_b:
            ua, da = eigenvector(state.theta_a, phi_a, 1), eigenvector(state.theta_a, phi_a, -1)
            ub, db = eigenvector(state.theta_b, phi_b, 1), eigenvector(state.theta_b, phi_b, -1)
            cp = amplitude(coeffs, ua, ub)
            cm = amplitude(coeffs, da, db)
            rebuilt = _table_from_axes(phi_a, phi_b, cp, cm, state.theta_a, state.theta_b)
            resid = math.sqrt(sum((rebuilt[i][j] - coeffs[i][j]) ** 2
                                  for i in range(2) for j in range(2)))
            # strict < keeps the earlier (+ branch) candidate on ties
            if best is None or resid < best[0] - 1e-15:
                best = (resid, phi_a, phi_b, cp, cm)
    _, phi_a, phi_b, cp, cm = best
    signs = (1 if cp >= 0.0 else -1, 1 if cm >= 0.0 else -1)
    # squared projections on the chosen axes equal the eigenvalues, and avoid
    # the sqrt blow-up of a rounding-level lambda_-
    return SchmidtForm(cp * cp, cm * cm, phi_a, phi_b, signs, state.theta_a, state.theta_b,
                       False, **extra)


class Entanglement(enum.Enum):
    PRODUCT = "product"
    PARTIAL = "partial"
    MAXIMAL = "maximal"


class EntanglementClass(NamedTuple):
    tag: Entanglement
    concurrence_like: float | None


def classify(form: SchmidtForm, tol: float = CLASSIFY_TOL) -> EntanglementClass:
    """Product, partial or maximal entanglement from the Schmidt eigenvalues.

    ``concurrence_like = 2|c_+- c_-+|`` is only reported for ``c_++ = 0``
    inputs; otherwise it is ``None``.
    """
    if form.lambda_minus <= tol:
        tag = Entanglement.PRODUCT
    elif abs(form.lambda_plus - form.lambda_minus) <= tol:
        tag = Entanglement.MAXIMAL
    else:
        tag = Entanglement.PARTIAL
    conc = None
    if form.c_pm is not None and form.c_mp is not None:
        conc = 2.0 * abs(form.c_pm * form.c_mp)
    return EntanglementClass(tag, conc)


class GoldenEigenvectors(NamedTuple):
    f_plus: float
    g_plus: float
    f_minus: float
    g_minus: float


def golden_eigenvectors() -> GoldenEigenvectors:
    """Eigenvectors of the reduced matrix of the maximal-probability state, surd form.

    Valid for the sign choice ``c_+- = c_-+ = 1/golden^2`` (squared),
    all three coefficients positive.
    """
    r5 = math.sqrt(5.0)
    root = math.sqrt(6.0 * r5 - 13.0)
    inner = math.sqrt(106.0 * r5 - 237.0)
    g_num = math.sqrt(10.0 * r5 - 22.0)
    den_p = math.sqrt(12.0 * r5 - 26.0 - 2.0 * inner)
    den_m = math.sqrt(12.0 * r5 - 26.0 + 2.0 * inner)
    return GoldenEigenvectors((2.0 - r5 + root) / den_p, g_num / den_p,
                              (2.0 - r5 - root) / den_m, g_num / den_m)


def golden_eigenvectors_tau() -> GoldenEigenvectors:
    """Same eigenvectors written through powers of the golden ratio."""
    t = GOLDEN
    root = math.sqrt(1.0 - 4.0 * t ** -4)
    g_num = 2.0 * t ** -2.5
    den_p = math.sqrt(2.0 - 8.0 * t ** -4 - 2.0 * t ** -3 * root)
    den_m = math.sqrt(2.0 - 8.0 * t ** -4 + 2.0 * t ** -3 * root)
    return GoldenEigenvectors((-t ** -3 + root) / den_p, g_num / den_p,
                              (-t ** -3 - root) / den_m, g_num / den_m)


class ProductCheck(NamedTuple):
    lhs: tuple[float, float, float, float]
    compatible: bool


def product_state_conditions(phi_a: Angle, phi_b: Angle, setup: MeasurementSetup,
                             tol: float = PRODUCT_TOL) -> ProductCheck:
    """Hardy conditions for the product state ``|S(phi_a)=-1>|S(phi_b)=-1>``.

    The four amplitudes are products of half-angle factors in
    ``delta = theta - phi``; the first three must vanish and the last must not.
    """
    da = 0.5 * (setup.theta_a - phi_a)
    db = 0.5 * (setup.theta_b - phi_b)
    dap = 0.5 * (setup.theta_a_prime - phi_a)
    dbp = 0.5 * (setup.theta_b_prime - phi_b)
    lhs = (
        math.sin(da) * math.sin(db),
        math.cos(da) * math.cos(dbp),
        math.cos(dap) * math.cos(db),
        math.cos(dap) * math.cos(dbp),
    )
    compatible = all(abs(x) <= tol for x in lhs[:3]) and abs(lhs[3]) > tol
    return ProductCheck(lhs, compatible)
