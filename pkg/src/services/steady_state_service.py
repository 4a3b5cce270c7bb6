"""
Self-consistent steady state of the pump-driven compound resonator.

Eliminating a1_s between the displacement and amplitude equations gives a
real cubic in the static displacement x:

    x |D(x)|^2 = (hbar g / (m omega_m^2)) E_L^2 |i Delta_L - kappa|^2,
    D(x) = (i Delta_L - kappa)(gamma + i Delta_L - i g x) + J^2.
"""
import logging
import math
from typing import List

from ..dto.params import DriveParams, PhysicalConstants, SystemParams
from ..dto.steady_state import CubicPoly, SteadyState, SteadyStateReport
from ..utils.errors import LasingThresholdError, SteadyStateInternalError
from ..utils.numerics import real_cubic_roots
from .params_service import DEFAULT_CONSTANTS

log = logging.getLogger(__name__)

HOMOTOPY_FRACTIONS = (1e-3, 1e-2, 0.1, 0.3, 1.0)
THRESHOLD_TOL = 1e-6
RESIDUAL_TOL = 1e-10


def _p(sys: SystemParams, drive: DriveParams) -> complex:
    # i Delta_L - kappa
    return complex(-sys.kappa, drive.Delta_L)


def denominator(sys: SystemParams, drive: DriveParams, x: float) -> complex:
    """D(x) = (i Delta_L - kappa)(gamma + i Delta_L - i g x) + J^2"""
    p = _p(sys, drive)
    return p * complex(sys.gamma, drive.Delta_L - sys.g_om * x) + sys.J_coupling ** 2


def force_coefficient(sys: SystemParams, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """hbar g / (m omega_m^2): static displacement per intracavity photon"""
    return constants.hbar * sys.g_om / (sys.m_eff * sys.omega_m ** 2)


def cubic_coefficients(sys: SystemParams, drive: DriveParams,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS) -> CubicPoly:
    p = _p(sys, drive)
    D0 = denominator(sys, drive, 0.0)
    c = -1j * sys.g_om * p
    return CubicPoly(
        c3=abs(c) ** 2,
        c2=2.0 * (D0.conjugate() * c).real,
        c1=abs(D0) ** 2,
        c0=-force_coefficient(sys, constants) * drive.E_L ** 2 * abs(p) ** 2,
    )


def _polish(poly: CubicPoly, x: float, max_steps: int = 4) -> float:
    for _ in range(max_steps):
        df = poly.derivative(x)
        if df == 0.0:
            break
        step = poly(x) / df
        x -= step
        if abs(step) <= 1e-14 * max(abs(x), 1e-300):
            break
    return x


def real_roots(poly: CubicPoly, length_scale: float) -> List[float]:
    """
    Real roots of the displacement cubic.

    The closed form is applied to the cubic in the dimensionless variable
    x / length_scale, then each root is polished on the SI polynomial.
    """
    if poly.c0 == 0.0:
        rest = real_cubic_roots(0.0, poly.c3, poly.c2, poly.c1)
        return sorted({0.0, *rest})

    s = length_scale
    scaled = (poly.c3 * s ** 3, poly.c2 * s ** 2, poly.c1 * s, poly.c0)
    norm = max(abs(c) for c in scaled)
    roots = real_cubic_roots(*(c / norm for c in scaled))
    return sorted(_polish(poly, r * s) for r in roots)


def all_real_roots(sys: SystemParams, drive: DriveParams,
                   constants: PhysicalConstants = DEFAULT_CONSTANTS) -> List[float]:
    """Every real root of the self-consistency cubic (diagnostic)"""
    return real_roots(cubic_coefficients(sys, drive, constants), _length_scale(sys))


def _length_scale(sys: SystemParams) -> float:
    return sys.gamma / sys.g_om if sys.g_om > 0 else 1.0


def _admissible(roots: List[float], scale: float) -> List[float]:
    return [max(r, 0.0) for r in roots if r >= -1e-12 * scale]


def _select_branch(sys: SystemParams, drive: DriveParams, constants: PhysicalConstants) -> float:
    if drive.E_L == 0.0 or sys.g_om == 0.0:
        return 0.0
    full = cubic_coefficients(sys, drive, constants)
    scale = _length_scale(sys)
    x_prev = 0.0
    for fraction in HOMOTOPY_FRACTIONS:
        poly = full.model_copy(update={"c0": full.c0 * fraction})
        candidates = _admissible(real_roots(poly, scale), scale)
        if not candidates:
            raise SteadyStateInternalError(
                f"No real non-negative displacement root at pump fraction {fraction}"
            )
        x_prev = min(candidates, key=lambda r: abs(r - x_prev))
        log.debug("homotopy fraction %g: %d admissible root(s), tracking x=%.6e",
                  fraction, len(candidates), x_prev)
    return x_prev


def _steady_state_at(sys: SystemParams, drive: DriveParams, x_s: float,
                     constants: PhysicalConstants) -> SteadyState:
    D = denominator(sys, drive, x_s)
    if abs(D) < THRESHOLD_TOL * sys.gamma ** 2:
        raise LasingThresholdError(
            f"Lasing-threshold singularity: |D| = {abs(D):.3e} < {THRESHOLD_TOL:g}*gamma^2 "
            f"(kappa/gamma={sys.kappa / sys.gamma:g}, J/gamma={sys.J_coupling / sys.gamma:g}, "
            f"Delta_L={drive.Delta_L:g}); the linear steady state does not exist"
        )
    a1 = drive.E_L * _p(sys, drive) / D
    a2 = 1j * sys.J_coupling * drive.E_L / D
    n1 = abs(a1) ** 2
    n2 = abs(a2) ** 2
    return SteadyState(x_s=x_s, a1_s=a1, a2_s=a2, n1=n1, n2=n2,
                       residual=residual(sys, drive, x_s, a1, a2, constants))


def residual(sys: SystemParams, drive: DriveParams, x_s: float, a1: complex, a2: complex,
             constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Max relative defect of the three steady-state equations"""
    D = denominator(sys, drive, x_s)
    x_rhs = force_coefficient(sys, constants) * abs(a1) ** 2
    a1_rhs = drive.E_L * _p(sys, drive) / D
    a2_rhs = 1j * sys.J_coupling * drive.E_L / D
    return max(_rel(x_s, x_rhs), _rel(a1, a1_rhs), _rel(a2, a2_rhs))


def _rel(value, reference) -> float:
    scale = max(abs(value), abs(reference))
    return 0.0 if scale == 0.0 else abs(value - reference) / scale


def solve_steady_state(sys: SystemParams, drive: DriveParams,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS) -> SteadyState:
    """Physical branch: the root continuously connected to x_s = 0 as P_L -> 0"""
    x_s = _select_branch(sys, drive, constants)
    ss = _steady_state_at(sys, drive, x_s, constants)
    if ss.residual > RESIDUAL_TOL:
        raise SteadyStateInternalError(
            f"Steady-state residual {ss.residual:.3e} exceeds {RESIDUAL_TOL:g}"
        )
    return ss


def steady_state_report(sys: SystemParams, drive: DriveParams,
                        constants: PhysicalConstants = DEFAULT_CONSTANTS) -> SteadyStateReport:
    return SteadyStateReport(
        steady_state=solve_steady_state(sys, drive, constants),
        all_real_roots=all_real_roots(sys, drive, constants),
    )


def fixed_point_map(sys: SystemParams, drive: DriveParams, x: float,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """x -> (hbar g/(m omega_m^2)) |a1_s(x)|^2"""
    D = denominator(sys, drive, x)
    return force_coefficient(sys, constants) * abs(drive.E_L * _p(sys, drive) / D) ** 2

