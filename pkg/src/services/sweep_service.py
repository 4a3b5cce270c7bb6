"""
Sweep orchestration: spectrum series, pump-power delay sweeps, gain sweeps
and the figure-reproduction catalog.

Every point is independent; a worker pool evaluates them and results are
reassembled in input order.
"""
import concurrent.futures
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..dto.params import RunConfig
from ..dto.pt import PtClassification
from ..dto.response import SpectrumPoint
from ..dto.sweep import DelayRow, GainRow, SweepAxis, SweepSpec
from ..utils.errors import PhysicsError, UsageError
from ..utils.numerics import sign_changes
from .params_service import build, config_with
from .pt_phase_service import classify
from .response_service import group_delay, probe_response, spectrum_with_errors
from .steady_state_service import solve_steady_state

log = logging.getLogger(__name__)

DETUNING_SPAN = 2.0        # in units of omega_m
DETUNING_POINTS = 2001
PUMP_RANGE_UW = (0.5, 20.0)
PUMP_POINTS = 200
CAPTION_GAIN_RATIOS = (-1.0, -0.5, 0.0, 0.01, 0.05, 0.2, 0.5, 0.8, 1.0, 1.2, 1.5)
DAMPING_FACTORS = (1.0, 5.0, 25.0)


def detuning_ratios(span: float = DETUNING_SPAN, points: int = DETUNING_POINTS) -> List[float]:
    """Symmetric Delta_p/omega_m grid; the centre is exactly zero"""
    grid = np.linspace(-span, span, points)
    if points % 2 == 1:
        grid[points // 2] = 0.0
    return [float(v) for v in grid]


def pump_grid_uW(low: float = PUMP_RANGE_UW[0], high: float = PUMP_RANGE_UW[1],
                 points: int = PUMP_POINTS) -> List[float]:
    return [float(v) for v in np.geomspace(low, high, points)]


def gain_grid() -> List[float]:
    """Caption gain ratios plus a 0.01 grid over [0.9, 1.1]"""
    fine = np.round(np.arange(90, 111) * 0.01, 2)
    return sorted(set(CAPTION_GAIN_RATIOS) | {float(v) for v in fine})


def make_sweep(axis: SweepAxis, values: Sequence[float], outputs: Optional[Sequence[str]] = None) -> SweepSpec:
    """Validated sweep; bad grids are usage errors"""
    try:
        if outputs is None:
            return SweepSpec(axis=axis, values=list(values))
        return SweepSpec(axis=axis, values=list(values), outputs=list(outputs))
    except ValidationError as e:
        raise UsageError(f"Invalid {axis.value} grid: {e.errors()[0]['msg']}")


def parallel_map(func: Callable, tasks: Sequence[tuple], jobs: int = 1) -> list:
    """func(*task) for every task, in input order"""
    if jobs <= 1 or len(tasks) <= 1:
        return [func(*task) for task in tasks]
    results: Dict[int, object] = {}
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(func, *task): i for i, task in enumerate(tasks)}
        for future in concurrent.futures.as_completed(futures):
            results[futures[future]] = future.result()
    return [results[i] for i in range(len(tasks))]


@dataclass
class SpectrumSeries:
    name: str
    kappa_over_gamma: float
    P_L: float
    omega_m: float
    points: List[Optional[SpectrumPoint]]
    errors: List[Optional[str]]
    pt: PtClassification
    all_failed_detail: Optional[str] = None
    system_overrides: Dict[str, float] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return all(p is None for p in self.points)


def series_name(kappa_over_gamma: float, P_L: float, suffix: str = "") -> str:
    return f"kappa_{kappa_over_gamma:g}_P_{P_L * 1e6:g}uW{suffix}"


def compute_spectrum_series(config: RunConfig, kappa_over_gamma: float, P_L: float,
                            ratios: Sequence[float], name: Optional[str] = None,
                            system_overrides: Optional[Dict[str, float]] = None) -> SpectrumSeries:
    overrides = dict(system_overrides or {})
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma, **overrides)
    sys, drive = build(cfg, P_L=P_L)
    grid = [r * sys.omega_m for r in ratios]
    pt = classify(sys, drive.Delta_L)
    name = name or series_name(kappa_over_gamma, P_L)
    try:
        ss = solve_steady_state(sys, drive)
    except PhysicsError as e:
        log.warning("series %s: %s", name, e.detail)
        return SpectrumSeries(name, kappa_over_gamma, P_L, sys.omega_m, [None] * len(grid),
                              [e.detail] * len(grid), pt, e.detail, overrides)
    points, errors = spectrum_with_errors(sys, drive, grid, ss=ss)
    log.info("series %s: %d points, %d singular", name, len(points), sum(e is not None for e in errors))
    return SpectrumSeries(name, kappa_over_gamma, P_L, sys.omega_m, points, errors, pt, None, overrides)


def run_spectrum(config: RunConfig, sweep: SweepSpec, kappa_ratios: Sequence[float],
                 pump_powers: Sequence[float], jobs: int = 1) -> List[SpectrumSeries]:
    """One series per (kappa/gamma, P_L) combination over a detuning sweep (units of omega_m)"""
    if sweep.axis is not SweepAxis.DETUNING:
        raise UsageError(f"run_spectrum needs a detuning sweep, got {sweep.axis.value}")
    tasks = [(config, k, p, list(sweep.values)) for k in kappa_ratios for p in pump_powers]
    return parallel_map(compute_spectrum_series, tasks, jobs)


def delay_row(config: RunConfig, P_L_uW: float, kappa_over_gamma: float) -> DelayRow:
    """tau_g at Delta_p = 0 for one pump power and gain ratio"""
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    sys, drive = build(cfg, P_L=P_L_uW * 1e-6, Delta_p=0.0)
    label = classify(sys, drive.Delta_L).phase_label.value
    try:
        ss = solve_steady_state(sys, drive)
        tau = group_delay(sys, drive, ss=ss)
    except PhysicsError as e:
        log.warning("delay at P_L=%g uW, kappa/gamma=%g: %s", P_L_uW, kappa_over_gamma, e.detail)
        return DelayRow(P_L_uW=P_L_uW, kappa_over_gamma=kappa_over_gamma, pt_label=label, error=e.detail)
    return DelayRow(P_L_uW=P_L_uW, kappa_over_gamma=kappa_over_gamma, tau_g_s=tau, pt_label=label,
                    x_s_m=ss.x_s, n1=ss.n1)


def run_delay_sweep(config: RunConfig, sweep: SweepSpec, gain_ratios: Sequence[float],
                    jobs: int = 1) -> List[DelayRow]:
    """Rows ordered by gain ratio, then pump power (sweep values in uW)"""
    if sweep.axis is not SweepAxis.PUMP_POWER:
        raise UsageError(f"run_delay_sweep needs a pump-power sweep, got {sweep.axis.value}")
    tasks = [(config, p, k) for k in gain_ratios for p in sweep.values]
    return parallel_map(delay_row, tasks, jobs)


def delay_crossings(rows: Sequence[DelayRow]) -> Dict[str, List[Tuple[float, str]]]:
    """Zero crossings of tau_g versus P_L, per gain ratio"""
    by_gain: Dict[float, List[DelayRow]] = {}
    for row in rows:
        by_gain.setdefault(row.kappa_over_gamma, []).append(row)
    return {
        f"{k:g}": sign_changes([r.P_L_uW for r in series], [r.tau_g_s for r in series])
        for k, series in by_gain.items()
    }


def gain_row(config: RunConfig, kappa_over_gamma: float, P_L: float) -> GainRow:
    """Transmission, phase and delay on resonance for one gain ratio"""
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    sys, drive = build(cfg, P_L=P_L, Delta_p=0.0)
    label = classify(sys, drive.Delta_L).phase_label.value
    try:
        ss = solve_steady_state(sys, drive)
        resp = probe_response(sys, drive, ss)
        tau = group_delay(sys, drive, ss=ss)
    except PhysicsError as e:
        log.warning("gain sweep at kappa/gamma=%g: %s", kappa_over_gamma, e.detail)
        return GainRow(kappa_over_gamma=kappa_over_gamma, pt_label=label, error=e.detail)
    return GainRow(kappa_over_gamma=kappa_over_gamma, eta=resp.eta, phase_rad=resp.phase,
                   tau_g_s=tau, pt_label=label, x_s_m=ss.x_s, n1=ss.n1)


def run_gain_sweep(config: RunConfig, sweep: SweepSpec, P_L: Optional[float] = None,
                   jobs: int = 1) -> List[GainRow]:
    if sweep.axis is not SweepAxis.GAIN_RATIO:
        raise UsageError(f"run_gain_sweep needs a gain-ratio sweep, got {sweep.axis.value}")
    power = config.P_L if P_L is None else P_L
    return parallel_map(gain_row, [(config, k, power) for k in sweep.values], jobs)


@dataclass(frozen=True)
class SeriesSpec:
    """One curve of a reproduced figure"""
    name: str
    kappa_over_gamma: float
    P_L_uW: float
    system_factors: Tuple[Tuple[str, float], ...] = ()


@dataclass(frozen=True)
class FigureSpec:
    kind: str                        # "spectrum" or "delay"
    series: Tuple[SeriesSpec, ...] = ()
    gain_ratios: Tuple[float, ...] = ()


def _spectra(kappas: Sequence[float], powers_uW: Sequence[float]) -> Tuple[SeriesSpec, ...]:
    return tuple(SeriesSpec(series_name(k, p * 1e-6), k, p) for k in kappas for p in powers_uW)


FIGURES: Dict[str, FigureSpec] = {
    "fig2a": FigureSpec("spectrum", _spectra((-1.0, -0.5, 0.0, 0.5), (10.0,))),
    "fig2b": FigureSpec("spectrum", _spectra((0.5, 1.0, 1.5), (10.0,))),
    "fig3": FigureSpec("spectrum", _spectra((0.01, 0.05, 0.2, 0.5, 1.0, 1.5), (10.0,))),
    "fig4a": FigureSpec("spectrum", _spectra((-1.0,), (5.0, 10.0, 20.0))),
    "fig4b": FigureSpec("spectrum", _spectra((1.5,), (10.0, 20.0))),
    "fig5a": FigureSpec("delay", gain_ratios=(0.5, 0.8, 0.9)),
    "fig5b": FigureSpec("delay", gain_ratios=(1.0, 1.2, 1.5)),
    "fig6": FigureSpec("spectrum", tuple(
        SeriesSpec(f"{panel}_{s.name}", s.kappa_over_gamma, s.P_L_uW)
        for panel, specs in (
            ("a", _spectra((0.5,), (2.0, 15.0))),
            ("b", _spectra((1.5,), (2.0, 15.0))),
            ("c", _spectra((0.5, 0.9, 1.5), (10.0,))),
            ("d", _spectra((-1.0,), (2.0, 10.0, 20.0))),
        )
        for s in specs
    )),
    "damping": FigureSpec("spectrum", tuple(
        SeriesSpec(f"kappa_{k:g}_Gamma_m_x{f:g}", k, 10.0, (("Gamma_m", f),))
        for k in (-1.0, 0.5) for f in DAMPING_FACTORS
    )),
}


def figure_spec(figure_id: str) -> FigureSpec:
    if figure_id not in FIGURES:
        raise UsageError(f"Unknown figure id '{figure_id}'. Valid ids: {', '.join(FIGURES)}")
    return FIGURES[figure_id]


def reproduce_spectra(config: RunConfig, spec: FigureSpec, ratios: Sequence[float],
                      jobs: int = 1) -> List[SpectrumSeries]:
    tasks = []
    for s in spec.series:
        overrides = {key: factor * getattr(config.system, key) for key, factor in s.system_factors}
        tasks.append((config, s.kappa_over_gamma, s.P_L_uW * 1e-6, list(ratios), s.name, overrides))
    return parallel_map(compute_spectrum_series, tasks, jobs)


def series_summary(series: SpectrumSeries) -> Dict[str, object]:
    """One report row per spectrum series"""
    valid = [p for p in series.points if p is not None]
    centre = next((p for p in valid if p.Delta_p == 0.0), None)
    return {
        "series": series.name,
        "kappa_over_gamma": series.kappa_over_gamma,
        "P_L_uW": series.P_L * 1e6,
        "pt_label": series.pt.phase_label.value,
        "unstable": series.pt.unstable,
        "eta_at_zero": centre.eta if centre else None,
        "eta_max": max((p.eta for p in valid), default=None),
        "failed_points": sum(e is not None for e in series.errors),
    }
