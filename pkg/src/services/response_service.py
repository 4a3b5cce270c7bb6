"""
Linearized probe response, transmission spectrum and group delay.

Sideband amplitudes are first computed per unit probe amplitude, so the
transmission t = 1 - 2 gamma A / eps_p stays defined (and exactly
independent of eps_p) even when the probe power is zero.
"""
import cmath
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import peak_widths

from ..dto.params import DriveParams, PhysicalConstants, SystemParams
from ..dto.response import ProbeResponse, SpectrumPoint
from ..dto.steady_state import SteadyState
from ..utils.errors import (
    ApproximationPoleError,
    DelayDerivativeUnstableError,
    ResponseSingularityError,
    SteadyStateInternalError,
)
from ..utils.numerics import local_maxima, local_minima, unwrap_anchored
from .params_service import DEFAULT_CONSTANTS, with_probe_detuning
from .steady_state_service import RESIDUAL_TOL, solve_steady_state

log = logging.getLogger(__name__)

SINGULARITY_TOL = 1e-12
DELAY_STEP = 1e-6          # in units of gamma
DELAY_RTOL = 1e-6
DELAY_MAX_HALVINGS = 10


def _principal(phase: float) -> float:
    # arg in (-pi, pi]
    return math.pi if phase == -math.pi else phase


def _mechanical_inverse_susceptibility(sys: SystemParams, xi: float) -> complex:
    # omega_m^2 - xi^2 - i xi Gamma_m, factored to avoid cancellation near xi = omega_m
    return complex((sys.omega_m - xi) * (sys.omega_m + xi), -xi * sys.Gamma_m)


def _intermediates(sys: SystemParams, drive: DriveParams, ss: SteadyState):
    Delta, xi = drive.Delta_L, drive.xi
    gx = sys.g_om * ss.x_s
    J2 = sys.J_coupling ** 2
    mu_plus = complex(-sys.kappa, Delta - xi)
    mu_minus = complex(-sys.kappa, -Delta - xi)
    G1 = complex(sys.gamma, Delta - gx - xi) * mu_plus + J2
    G2 = complex(sys.gamma, -Delta + gx - xi) * mu_minus + J2
    return mu_plus, mu_minus, G1, G2


def _check_denominator(den: complex, sys: SystemParams, drive: DriveParams) -> None:
    natural = sys.m_eff * sys.gamma ** 6
    if abs(den) < SINGULARITY_TOL * natural:
        raise ResponseSingularityError(
            f"Response singularity: vanishing sideband denominator at Delta_p={drive.Delta_p:.9g} rad/s "
            f"(kappa/gamma={sys.kappa / sys.gamma:g}, J/gamma={sys.J_coupling / sys.gamma:g}, "
            f"P_L={drive.P_L:g} W)",
            delta_p=drive.Delta_p,
        )


def probe_response(sys: SystemParams, drive: DriveParams, ss: SteadyState,
                   constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ProbeResponse:
    """All first-order sideband amplitudes and the probe transmission"""
    if not ss.residual <= RESIDUAL_TOL:
        raise SteadyStateInternalError(
            f"Operating point residual {ss.residual:.3e} exceeds {RESIDUAL_TOL:g}; "
            "linearize only around a solved steady state"
        )
    hbar, g, m = constants.hbar, sys.g_om, sys.m_eff
    mu_plus, mu_minus, G1, G2 = _intermediates(sys, drive, ss)
    chi_inv = _mechanical_inverse_susceptibility(sys, drive.xi)
    K = hbar * g * g * ss.n1
    a = ss.a1_s

    den = chi_inv * G1 * G2 * m - 1j * K * (G2 * mu_plus - G1 * mu_minus)
    _check_denominator(den, sys, drive)
    den_minus = den.conjugate()
    optical = chi_inv * G2 * m + 1j * K * mu_minus

    # per unit probe amplitude
    da1_plus = optical * mu_plus / den
    da2_plus = 1j * sys.J_coupling * optical / den
    dx_plus = hbar * g * a.conjugate() * G2 * mu_plus / den
    da1_minus = 1j * hbar * g * g * a * a * mu_minus.conjugate() * mu_plus.conjugate() / den_minus
    da2_minus = -sys.J_coupling * hbar * g * g * a * a * mu_plus.conjugate() / den_minus
    dx_minus = hbar * g * a * G2.conjugate() * mu_plus.conjugate() / den_minus

    t_amp = 1.0 - 2.0 * sys.gamma * da1_plus
    eps = drive.eps_p
    return ProbeResponse(
        mu_plus=mu_plus,
        mu_minus=mu_minus,
        G1=G1,
        G2=G2,
        dx_plus=eps * dx_plus,
        dx_minus=eps * dx_minus,
        da1_plus=eps * da1_plus,
        da1_minus=eps * da1_minus,
        da2_plus=eps * da2_plus,
        da2_minus=eps * da2_minus,
        t_amp=t_amp,
        eta=abs(t_amp) ** 2,
        phase=_principal(cmath.phase(t_amp)),
    )


def probe_amplitude_closed_form(sys: SystemParams, drive: DriveParams, ss: SteadyState,
                                constants: PhysicalConstants = DEFAULT_CONSTANTS) -> complex:
    """
    A = delta a_{1+} from the single-fraction expression

        A = [chi^-1 G2 m + i hbar g^2 n1 mu_-] mu_+ eps_p
            / [chi^-1 G1 G2 m - i hbar g^2 n1 (G2 mu_+ - G1 mu_-)]
    """
    Delta, xi, kappa = drive.Delta_L, drive.xi, sys.kappa
    gx = sys.g_om * ss.x_s
    mp = -kappa - 1j * xi + 1j * Delta
    mm = -kappa - 1j * xi - 1j * Delta
    g1 = (1j * Delta + sys.gamma - 1j * gx - 1j * xi) * mp + sys.J_coupling ** 2
    g2 = (-1j * Delta + sys.gamma + 1j * gx - 1j * xi) * mm + sys.J_coupling ** 2
    susc = (sys.omega_m - xi) * (sys.omega_m + xi) - 1j * xi * sys.Gamma_m
    coupling = 1j * constants.hbar * sys.g_om ** 2 * ss.n1
    numerator = (susc * g2 * sys.m_eff + coupling * mm) * mp * drive.eps_p
    return numerator / (susc * g1 * g2 * sys.m_eff - coupling * (g2 * mp - g1 * mm))


def linear_system_response(sys: SystemParams, drive: DriveParams, ss: SteadyState,
                           constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ProbeResponse:
    """
    Solve the six linearized sideband equations as a dense linear system.

    Unknowns (A+, B+, g X+, conj A-, conj B-, g conj X-); the displacement is
    carried as g*x so every column is of order one in natural units.
    """
    Delta, xi, kappa, gamma, J = drive.Delta_L, drive.xi, sys.kappa, sys.gamma, sys.J_coupling
    gx = sys.g_om * ss.x_s
    a = ss.a1_s
    chi_inv = _mechanical_inverse_susceptibility(sys, xi)
    force = constants.hbar * sys.g_om ** 2 / sys.m_eff
    c_plus = complex(gamma, Delta - gx - xi)
    c_minus_conj = complex(gamma, -Delta + gx - xi)
    mu_plus = complex(-kappa, Delta - xi)
    mu_minus = complex(-kappa, -Delta - xi)

    M = np.zeros((6, 6), dtype=complex)
    rhs = np.zeros(6, dtype=complex)
    M[0, [0, 1, 2]] = [c_plus, -1j * J, -1j * a]
    rhs[0] = 1.0
    M[1, [0, 1]] = [-1j * J, mu_plus]
    M[2, [3, 4, 5]] = [c_minus_conj, 1j * J, 1j * a.conjugate()]
    M[3, [3, 4]] = [1j * J, mu_minus]
    M[4, [0, 2, 3]] = [-force * a.conjugate(), chi_inv, -force * a]
    M[5, [0, 3, 5]] = [-force * a.conjugate(), -force * a, chi_inv]
    # equilibrate rows then columns before the dense solve
    row_scale = 1.0 / np.abs(M).max(axis=1)
    scaled = M * row_scale[:, None]
    col_scale = 1.0 / np.abs(scaled).max(axis=0)
    y = np.linalg.solve(scaled * col_scale[None, :], rhs * row_scale)
    A, B, gX, C, E, gY = y * col_scale

    eps = drive.eps_p
    mp, mm = mu_plus, mu_minus
    G1 = c_plus * mp + J ** 2
    G2 = c_minus_conj * mm + J ** 2
    t_amp = complex(1.0 - 2.0 * gamma * A)
    return ProbeResponse(
        mu_plus=mp, mu_minus=mm, G1=G1, G2=G2,
        dx_plus=eps * gX / sys.g_om,
        dx_minus=eps * complex(gY).conjugate() / sys.g_om,
        da1_plus=eps * A,
        da1_minus=eps * complex(C).conjugate(),
        da2_plus=eps * B,
        da2_minus=eps * complex(E).conjugate(),
        t_amp=t_amp,
        eta=abs(t_amp) ** 2,
        phase=_principal(cmath.phase(t_amp)),
    )


def single_cavity_response(sys: SystemParams, drive: DriveParams, ss: SteadyState,
                           constants: PhysicalConstants = DEFAULT_CONSTANTS) -> complex:
    """Transmission of the bare optomechanical resonator (no tunnel coupling)"""
    Delta, xi = drive.Delta_L, drive.xi
    gx = sys.g_om * ss.x_s
    c1 = complex(sys.gamma, Delta - gx - xi)
    c2 = complex(sys.gamma, -Delta + gx - xi)
    chi_inv = _mechanical_inverse_susceptibility(sys, xi)
    K = constants.hbar * sys.g_om ** 2 * ss.n1
    A = (chi_inv * c2 * sys.m_eff + 1j * K) / (chi_inv * c1 * c2 * sys.m_eff - 1j * K * (c2 - c1))
    return 1.0 - 2.0 * sys.gamma * A


def _transmission(sys: SystemParams, drive: DriveParams, ss: SteadyState,
                  constants: PhysicalConstants) -> complex:
    return probe_response(sys, drive, ss, constants).t_amp


def spectrum_with_errors(sys: SystemParams, drive_base: DriveParams, detuning_grid: Sequence[float],
                         constants: PhysicalConstants = DEFAULT_CONSTANTS,
                         ss: Optional[SteadyState] = None
                         ) -> Tuple[List[Optional[SpectrumPoint]], List[Optional[str]]]:
    """
    Spectrum over a probe-detuning grid, recording singular points instead of
    aborting. The pump is fixed, so the steady state is solved once.
    """
    if ss is None:
        ss = solve_steady_state(sys, drive_base, constants)
    ts: List[Optional[complex]] = []
    errors: List[Optional[str]] = []
    for Delta_p in detuning_grid:
        drive = with_probe_detuning(drive_base, sys, float(Delta_p), constants)
        try:
            ts.append(_transmission(sys, drive, ss, constants))
            errors.append(None)
        except ResponseSingularityError as e:
            log.warning(e.detail)
            ts.append(None)
            errors.append(e.detail)

    valid = [i for i, t in enumerate(ts) if t is not None]
    points: List[Optional[SpectrumPoint]] = [None] * len(ts)
    if not valid:
        return points, errors

    principal = [_principal(cmath.phase(ts[i])) for i in valid]
    anchor = min(range(len(valid)), key=lambda k: abs(detuning_grid[valid[k]]))
    phases = unwrap_anchored(principal, anchor)
    for k, i in enumerate(valid):
        t = ts[i]
        points[i] = SpectrumPoint(
            Delta_p=float(detuning_grid[i]),
            eta=abs(t) ** 2,
            phase=float(phases[k]),
            t_re=t.real,
            t_im=t.imag,
        )
    return points, errors


def spectrum(sys: SystemParams, drive_base: DriveParams, detuning_grid: Sequence[float],
             constants: PhysicalConstants = DEFAULT_CONSTANTS,
             ss: Optional[SteadyState] = None) -> List[SpectrumPoint]:
    if len(detuning_grid) == 0:
        raise ValueError("detuning grid must not be empty")
    if not all(math.isfinite(d) for d in detuning_grid):
        raise ValueError("detuning grid must be finite")
    points, errors = spectrum_with_errors(sys, drive_base, detuning_grid, constants, ss)
    for Delta_p, error in zip(detuning_grid, errors):
        if error is not None:
            raise ResponseSingularityError(error, delta_p=float(Delta_p))
    return points


def _five_point_derivative(sys: SystemParams, drive: DriveParams, ss: SteadyState,
                           center: float, h: float, constants: PhysicalConstants) -> float:
    offsets = (-2, -1, 0, 1, 2)
    phases = [
        cmath.phase(_transmission(sys, with_probe_detuning(drive, sys, center + k * h, constants), ss, constants))
        for k in offsets
    ]
    p = np.unwrap(phases)
    return float((p[0] - 8.0 * p[1] + 8.0 * p[3] - p[4]) / (12.0 * h))


def group_delay(sys: SystemParams, drive: DriveParams,
                constants: PhysicalConstants = DEFAULT_CONSTANTS,
                ss: Optional[SteadyState] = None, at_delta_p: float = 0.0) -> float:
    """
    tau_g = d arg t / d omega_p at the probe detuning ``at_delta_p`` (seconds).

    Five-point central difference with step 1e-6 gamma, accepted once the
    estimate at half the step agrees to 1e-6; otherwise the step is halved.
    """
    if ss is None:
        ss = solve_steady_state(sys, drive, constants)
    h = DELAY_STEP * sys.gamma
    floor = 1e-12 / sys.gamma
    coarse = _five_point_derivative(sys, drive, ss, at_delta_p, h, constants)
    for halving in range(DELAY_MAX_HALVINGS + 1):
        fine = _five_point_derivative(sys, drive, ss, at_delta_p, h / 2.0, constants)
        if abs(fine - coarse) <= DELAY_RTOL * max(abs(fine), floor):
            return (16.0 * fine - coarse) / 15.0
        log.debug("group delay: step %g rad/s not converged (%.6e vs %.6e), halving", h, coarse, fine)
        h /= 2.0
        coarse = fine
    raise DelayDerivativeUnstableError(
        f"Delay derivative unstable at Delta_p={at_delta_p:g} rad/s "
        f"(kappa/gamma={sys.kappa / sys.gamma:g}, P_L={drive.P_L:g} W): "
        "the phase is discontinuous at this point"
    )


def eta_approx(sys: SystemParams, ss: SteadyState,
               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Asymptotic transmission for Delta_L ~ 0, xi ~ 0, x_s ~ 0"""
    kg = sys.kappa * sys.gamma
    balance = sys.J_coupling ** 2 - kg
    if balance == 0.0:
        raise ApproximationPoleError("J^2 = kappa*gamma: the asymptotic transmission formula has a pole here")
    stiffness = sys.m_eff * sys.omega_m ** 2
    numerator = 2.0 * kg * complex(stiffness * balance, -constants.hbar * sys.g_om ** 2 * ss.n1 * sys.kappa)
    return abs(1.0 + numerator / (stiffness * balance ** 2)) ** 2


def find_local_extrema(eta: Sequence[float]) -> Tuple[List[int], List[int]]:
    """Indices of 3-point local maxima and minima of a transmission series"""
    return [int(i) for i in local_maxima(eta)], [int(i) for i in local_minima(eta)]


def window_width(points: Sequence[SpectrumPoint], index: int) -> float:
    """
    Full width at half prominence of the feature at ``index`` (a peak or a dip)
    in rad/s; the grid is assumed uniform.
    """
    eta = np.array([p.eta for p in points])
    left = eta[index - 1] if index > 0 else -np.inf
    right = eta[index + 1] if index + 1 < len(eta) else -np.inf
    signal = eta if eta[index] >= max(left, right) else -eta
    widths, *_ = peak_widths(signal, [index], rel_height=0.5)
    spacing = points[1].Delta_p - points[0].Delta_p
    return float(widths[0] * abs(spacing))


def phase_slope(points: Sequence[SpectrumPoint], index: int) -> float:
    """Central-difference slope of the (unwrapped) phase at ``index``"""
    before, after = points[index - 1], points[index + 1]
    return (after.phase - before.phase) / (after.Delta_p - before.Delta_p)
