"""
Time-domain oracle: RK4 integration of the mean-field equations in the pump
rotating frame, then lock-in demodulation of the probe sideband.

Integration runs in dimensionless units (time in 1/gamma, rates in gamma,
displacement in x_zpf); fields keep their SI normalisation. With
u = x/x_zpf and tau = gamma t:

    u''  = -(Gamma_m/gamma) u' - (omega_m/gamma)^2 u + 2 (omega_m/gamma)(g x_zpf/gamma) |a1|^2
    a1'  = (-i Delta_L/gamma + i (g x_zpf/gamma) u - 1) a1 + i (J/gamma) a2 + E_L/gamma + (eps_p/gamma) e^{-i xi tau/gamma}
    a2'  = (-i Delta_L/gamma + kappa/gamma) a2 + i (J/gamma) a1
"""
import cmath
import concurrent.futures
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from ..dto.params import DriveParams, PhysicalConstants, RunConfig, SystemParams
from ..dto.trajectory import DemodResult, OraclePoint, Trajectory, TrajectoryState
from ..utils.errors import InstabilityError, InvalidParameterError, NotConvergedError, PhysicsError
from .params_service import DEFAULT_CONSTANTS, build, config_with
from .pt_phase_service import classify, max_growth_rate
from .response_service import probe_response
from .steady_state_service import solve_steady_state

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e12
STEPS_PER_PERIOD = 50
ORACLE_STEPS_PER_PERIOD = 100
TRANSIENT_DECAYS = 40.0
WINDOW_PERIODS = 200
DRIFT_TOL = 1e-4
ORACLE_TOL = 1e-3
ORACLE_PROBE_RATIO = 1e-8
ORACLE_KAPPA_RATIOS = (-1.0, 0.2, 0.5)
ORACLE_DETUNING_RATIOS = (-1.0, -0.5, 0.0, 0.5, 1.0)


def max_rate(sys: SystemParams, drive: DriveParams) -> float:
    return max(sys.omega_m, abs(drive.xi), sys.J_coupling, sys.gamma, abs(sys.kappa))


def max_time_step(sys: SystemParams, drive: DriveParams) -> float:
    return 2.0 * math.pi / (STEPS_PER_PERIOD * max_rate(sys, drive))


def integrate(sys: SystemParams, drive: DriveParams, t_end: float, dt: float,
              initial: Optional[TrajectoryState] = None, stride: int = 1, sample_after: float = 0.0,
              constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Trajectory:
    """
    Fixed-step RK4 from t = 0 to t_end (seconds). States are sampled every
    ``stride`` steps once t >= sample_after; the initial state is always kept.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise InvalidParameterError("dt", dt)
    if dt > max_time_step(sys, drive) * (1.0 + 1e-12):
        raise InvalidParameterError("dt", dt, f"must not exceed {max_time_step(sys, drive):.6g} s")
    if stride < 1:
        raise InvalidParameterError("stride", stride, "must be at least 1")
    initial = initial or TrajectoryState()

    gamma = sys.gamma
    x0 = sys.x_zpf
    damping = sys.Gamma_m / gamma
    w2 = (sys.omega_m / gamma) ** 2
    gx0 = sys.g_om * x0 / gamma
    # hbar g / (m x_zpf gamma^2) == 2 (omega_m/gamma)(g x_zpf/gamma) for x_zpf^2 = hbar/(2 m omega_m)
    force = constants.hbar * sys.g_om / (sys.m_eff * x0 * gamma ** 2)
    detuning = complex(0.0, -drive.Delta_L / gamma)
    gain = complex(sys.kappa / gamma, -drive.Delta_L / gamma)
    coupling = 1j * sys.J_coupling / gamma
    pump = drive.E_L / gamma
    probe = drive.eps_p / gamma
    w_probe = drive.xi / gamma

    def rhs(tau, u, w, a1, a2):
        du = w
        dw = -damping * w - w2 * u + force * (a1.real * a1.real + a1.imag * a1.imag)
        drive_term = pump + probe * cmath.exp(-1j * w_probe * tau) if probe else pump
        da1 = (detuning + 1j * gx0 * u - 1.0) * a1 + coupling * a2 + drive_term
        da2 = gain * a2 + coupling * a1
        return du, dw, da1, da2

    h = dt * gamma
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    u, w = initial.x / x0, initial.v / (x0 * gamma)
    a1, a2 = complex(initial.a1), complex(initial.a2)
    first_sample = int(math.ceil(sample_after / dt - 1e-9))

    ts, us, ws, a1s, a2s = [0.0], [u], [w], [a1], [a2]
    for step in range(1, n_steps + 1):
        tau = (step - 1) * h
        k1 = rhs(tau, u, w, a1, a2)
        k2 = rhs(tau + 0.5 * h, u + 0.5 * h * k1[0], w + 0.5 * h * k1[1], a1 + 0.5 * h * k1[2], a2 + 0.5 * h * k1[3])
        k3 = rhs(tau + 0.5 * h, u + 0.5 * h * k2[0], w + 0.5 * h * k2[1], a1 + 0.5 * h * k2[2], a2 + 0.5 * h * k2[3])
        k4 = rhs(tau + h, u + h * k3[0], w + h * k3[1], a1 + h * k3[2], a2 + h * k3[3])
        u += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        w += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        a1 += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        a2 += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

        biggest = max(abs(u), abs(w), abs(a1), abs(a2))
        if not math.isfinite(biggest) or biggest > DIVERGENCE_LIMIT:
            t_bad = step * dt
            raise InstabilityError(
                f"Trajectory diverged at t={t_bad:.6g} s (kappa/gamma={sys.kappa / gamma:g}); "
                "the system is linearly unstable at these parameters",
                time=t_bad,
            )
        if step >= first_sample and step % stride == 0:
            ts.append(step * dt)
            us.append(u)
            ws.append(w)
            a1s.append(a1)
            a2s.append(a2)

    return Trajectory(
        t=np.array(ts),
        x=np.array(us) * x0,
        v=np.array(ws) * x0 * gamma,
        a1=np.array(a1s, dtype=complex),
        a2=np.array(a2s, dtype=complex),
    )


def _lock_in(t: np.ndarray, a1: np.ndarray, xi: float) -> complex:
    return complex(np.mean((a1 - a1.mean()) * np.exp(1j * xi * t)))


def demodulate(trajectory: Trajectory, sys: SystemParams, drive: DriveParams, periods: int = WINDOW_PERIODS,
               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> DemodResult:
    """
    e^{-i xi t} component of a1 over the last ``periods`` probe periods.

    Samples must be uniformly spaced with an integer number of samples per
    probe period. The two half-windows must agree to DRIFT_TOL.
    """
    if drive.xi == 0.0:
        raise InvalidParameterError("xi", drive.xi, "must be non-zero to separate the probe sideband")
    spacing = float(trajectory.t[-1] - trajectory.t[-2])
    per_period = 2.0 * math.pi / (abs(drive.xi) * spacing)
    n_period = int(round(per_period))
    if abs(per_period - n_period) > 1e-6 * per_period:
        raise InvalidParameterError("trajectory", spacing, "sample spacing must divide the probe period")
    n_window = periods * n_period
    if n_window > len(trajectory) - 1:
        raise NotConvergedError(
            f"Not converged: trajectory holds fewer than {periods} probe periods of samples; "
            "integrate to a longer t_end"
        )

    t = trajectory.t[-n_window:]
    a1 = trajectory.a1[-n_window:]
    amplitude = _lock_in(t, a1, drive.xi)

    half = n_window // 2
    if periods % 2 == 0 and drive.eps_p > 0.0:
        first = _lock_in(t[:half], a1[:half], drive.xi)
        second = _lock_in(t[half:], a1[half:], drive.xi)
        drift = abs(second - first) / abs(amplitude)
        if drift > DRIFT_TOL:
            raise NotConvergedError(
                f"Not converged: demodulated amplitude drifts by {drift:.3g} between half-windows "
                f"(Delta_p={drive.Delta_p:g} rad/s); integrate to a longer t_end"
            )

    if drive.eps_p > 0.0:
        t_est = 1.0 - 2.0 * sys.gamma * amplitude / drive.eps_p
    else:
        t_est = complex(math.nan, math.nan)
    eta_est = abs(t_est) ** 2

    rel_err = None
    if drive.eps_p > 0.0:
        try:
            ss = solve_steady_state(sys, drive, constants)
            eta_freq = probe_response(sys, drive, ss, constants).eta
            rel_err = abs(eta_est - eta_freq) / eta_freq
        except PhysicsError as e:
            log.warning("No frequency-domain reference for demodulated point: %s", e.detail)

    return DemodResult(
        da1_plus_est=amplitude,
        t_est=t_est,
        eta_est=eta_est,
        rel_err_vs_freq_domain=rel_err,
    )


def oracle_schedule(sys: SystemParams, drive: DriveParams, growth_rate: float):
    """(dt, t_end, sample_after) with an integer number of steps per probe period"""
    per_period = int(math.ceil(ORACLE_STEPS_PER_PERIOD * max_rate(sys, drive) / abs(drive.xi)))
    period = 2.0 * math.pi / abs(drive.xi)
    dt = period / per_period
    decay = min(abs(growth_rate), sys.Gamma_m) if sys.Gamma_m > 0 else abs(growth_rate)
    transient = TRANSIENT_DECAYS / decay
    transient_periods = int(math.ceil(transient / period))
    t_end = (transient_periods + WINDOW_PERIODS) * period
    sample_after = transient_periods * period - dt
    return dt, t_end, sample_after


def oracle_point(config: RunConfig, kappa_over_gamma: float, delta_p_over_omega_m: float,
                 tol: float = ORACLE_TOL, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> OraclePoint:
    """Compare demodulated and frequency-domain transmission at one parameter point"""
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    cfg = cfg.model_copy(update={"P_in": ORACLE_PROBE_RATIO * cfg.P_L})
    Delta_p = delta_p_over_omega_m * cfg.system.omega_m
    sys, drive = build(cfg, Delta_p=Delta_p, constants=constants)
    base = dict(kappa_over_gamma=kappa_over_gamma, delta_p_over_omega_m=delta_p_over_omega_m, Delta_p=Delta_p)

    try:
        ss = solve_steady_state(sys, drive, constants)
        eta_freq = probe_response(sys, drive, ss, constants).eta
    except PhysicsError as e:
        return OraclePoint(**base, eta_freq=math.nan, status="skipped", detail=e.detail)

    if drive.xi == 0.0:
        return OraclePoint(**base, eta_freq=eta_freq, status="skipped",
                           detail="probe degenerate with pump (xi = 0): sideband not separable")

    pt = classify(sys, drive.Delta_L)
    dt, t_end, sample_after = oracle_schedule(sys, drive, max_growth_rate(pt))
    initial = TrajectoryState(x=ss.x_s, v=0.0, a1=ss.a1_s, a2=ss.a2_s)
    log.info("oracle point kappa/gamma=%g Delta_p/omega_m=%g: %d steps",
             kappa_over_gamma, delta_p_over_omega_m, int(t_end / dt))
    try:
        trajectory = integrate(sys, drive, t_end, dt, initial, sample_after=sample_after, constants=constants)
        demod = demodulate(trajectory, sys, drive, constants=constants)
    except InstabilityError as e:
        if not pt.unstable:
            log.warning("Trajectory diverged at a point classified %s: %s", pt.phase_label.value, e.detail)
        return OraclePoint(**base, eta_freq=eta_freq, status="unstable", detail=e.detail)
    except NotConvergedError as e:
        return OraclePoint(**base, eta_freq=eta_freq, status="not-converged", detail=e.detail)

    if pt.unstable:
        log.warning("Trajectory stayed bounded at an unstable point (kappa/gamma=%g)", kappa_over_gamma)
    rel_err = abs(demod.eta_est - eta_freq) / eta_freq
    return OraclePoint(**base, eta_freq=eta_freq, eta_td=demod.eta_est, rel_err=rel_err,
                       status="pass" if rel_err <= tol else "fail")


def oracle_check(config: RunConfig, kappa_ratios: Sequence[float] = ORACLE_KAPPA_RATIOS,
                 detuning_ratios: Sequence[float] = ORACLE_DETUNING_RATIOS, jobs: int = 1,
                 tol: float = ORACLE_TOL) -> List[OraclePoint]:
    """Oracle grid; independent points run in parallel when jobs > 1"""
    tasks = [(k, d) for k in kappa_ratios for d in detuning_ratios]
    if jobs <= 1:
        return [oracle_point(config, k, d, tol) for k, d in tasks]

    results = {}
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(oracle_point, config, k, d, tol): (k, d) for k, d in tasks}
        for future in concurrent.futures.as_completed(futures):
            results[futures[future]] = future.result()
    return [results[task] for task in tasks]
