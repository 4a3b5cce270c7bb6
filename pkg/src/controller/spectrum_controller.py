"""
Spectrum Controller
`spectrum`: eta and phase versus probe detuning, one CSV per (kappa/gamma, P_L)
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from ..dto.sweep import SweepAxis
from ..services.artefact_service import config_hash, verify_spectrum_csv, write_spectrum_csv
from ..services.sweep_service import (
    DETUNING_POINTS,
    DETUNING_SPAN,
    SpectrumSeries,
    detuning_ratios,
    make_sweep,
    run_spectrum,
    series_summary,
)
from ..utils.errors import UsageError
from .common import RunContext, add_outputs_argument, finish_run

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("spectrum", help="Probe transmission spectrum versus detuning")
    p.add_argument("--kappa-over-gamma", dest="kappa_over_gamma", type=float, nargs="+",
                   help="Gain ratios (default: from the configuration)")
    p.add_argument("--P-L-uW", dest="P_L_uW", type=float, nargs="+",
                   help="Pump powers in microwatts (default: from the configuration)")
    p.add_argument("--span", type=float, default=DETUNING_SPAN, help="Grid half-width in units of omega_m")
    p.add_argument("--points", type=int, default=DETUNING_POINTS, help="Number of grid points")
    add_outputs_argument(p, SweepAxis.DETUNING)
    p.set_defaults(handler=handle)


def write_series(ctx: RunContext, subdir: str, series: Sequence[SpectrumSeries],
                 ratios: Sequence[float], columns: Optional[Sequence[str]] = None) -> Tuple[List[Path], List[str]]:
    """CSV per series, plus verification messages when --verify is set"""
    outputs, problems = [], []
    for s in series:
        path = write_spectrum_csv(ctx.out_dir / subdir / f"{s.name}.csv", s, ratios, columns)
        outputs.append(path)
        if s.pt.unstable:
            log.warning("series %s: operating point is linearly unstable (%s phase)", s.name, s.pt.phase_label.value)
        if ctx.verify and not s.failed:
            problems.extend(verify_spectrum_csv(path, ctx.config, s))
    return outputs, problems


def exit_status(series: Sequence[SpectrumSeries], problems: Sequence[str]) -> int:
    for message in problems:
        log.error("verify: %s", message)
    if problems:
        return 1
    if series and all(s.failed for s in series):
        log.error("every requested point failed: %s", series[0].all_failed_detail or series[0].errors[0])
        return 3
    return 0


def handle(args, ctx: RunContext) -> int:
    if args.points < 1:
        raise UsageError("Detuning grid must not be empty (--points must be at least 1)")
    gamma = ctx.config.system.gamma
    kappas = args.kappa_over_gamma or [ctx.config.system.kappa / gamma]
    powers = [p * 1e-6 for p in args.P_L_uW] if args.P_L_uW else [ctx.config.P_L]
    ratios = detuning_ratios(args.span, args.points)

    sweep = make_sweep(SweepAxis.DETUNING, ratios, args.outputs)
    series = run_spectrum(ctx.config, sweep, kappas, powers, ctx.jobs)
    outputs, problems = write_series(ctx, "spectrum", series, ratios, sweep.requested)
    rows = [series_summary(s) for s in series]
    digest = config_hash(ctx.config, "spectrum", {"kappa_over_gamma": kappas, "P_L": powers,
                                                  "span": args.span, "points": args.points})
    finish_run(ctx, "spectrum", digest, outputs,
               {"series": len(series), "verified": ctx.verify, "failed_points": sum(r["failed_points"] for r in rows)},
               rows)
    return exit_status(series, problems)
