"""
Delay Controller
`delay-sweep`: group delay at Delta_p = 0 versus pump power
`gain-sweep`: on-resonance transmission, phase and delay versus kappa/gamma
"""
import logging

from ..dto.sweep import SweepAxis
from ..services.artefact_service import config_hash, verify_delay_rows, write_delay_csv, write_gain_csv
from ..services.sweep_service import (
    PUMP_POINTS,
    PUMP_RANGE_UW,
    delay_crossings,
    gain_grid,
    make_sweep,
    pump_grid_uW,
    run_delay_sweep,
    run_gain_sweep,
)
from ..utils.errors import UsageError
from .common import RunContext, add_outputs_argument, finish_run

log = logging.getLogger(__name__)

DEFAULT_DELAY_GAINS = (-1.0, 0.5, 1.5)


def register(subparsers) -> None:
    p = subparsers.add_parser("delay-sweep", help="Group delay versus pump power")
    p.add_argument("--kappa-over-gamma", dest="kappa_over_gamma", type=float, nargs="+",
                   default=list(DEFAULT_DELAY_GAINS))
    p.add_argument("--P-min-uW", dest="P_min_uW", type=float, default=PUMP_RANGE_UW[0])
    p.add_argument("--P-max-uW", dest="P_max_uW", type=float, default=PUMP_RANGE_UW[1])
    p.add_argument("--points", type=int, default=PUMP_POINTS)
    add_outputs_argument(p, SweepAxis.PUMP_POWER)
    p.set_defaults(handler=handle_delay)

    g = subparsers.add_parser("gain-sweep", help="On-resonance response versus gain ratio")
    g.add_argument("--kappa-over-gamma", dest="kappa_over_gamma", type=float, nargs="+",
                   help="Gain ratios (default: caption values plus a fine grid around 1)")
    g.add_argument("--P-L-uW", dest="P_L_uW", type=float, help="Pump power in microwatts")
    add_outputs_argument(g, SweepAxis.GAIN_RATIO)
    g.set_defaults(handler=handle_gain)


def run_delay(ctx: RunContext, subdir: str, pumps, gains, command: str, outputs=None) -> int:
    sweep = make_sweep(SweepAxis.PUMP_POWER, pumps, outputs)
    rows = run_delay_sweep(ctx.config, sweep, gains, ctx.jobs)
    path = write_delay_csv(ctx.out_dir / subdir / "delay.csv", rows, sweep.requested)
    crossings = delay_crossings(rows)
    for k, found in crossings.items():
        log.info("kappa/gamma=%s: %d tau_g sign change(s) %s", k, len(found), found)

    problems = verify_delay_rows(ctx.config, rows) if ctx.verify else []
    summary = {
        "zero_crossings": {k: [{"P_L_uW": x, "direction": d} for x, d in v] for k, v in crossings.items()},
        "failed_points": sum(1 for r in rows if r.error),
        "verified": ctx.verify,
    }
    digest = config_hash(ctx.config, command, {"P_L_uW": list(pumps), "kappa_over_gamma": list(gains)})
    series = [{"kappa_over_gamma": float(k), "crossings": len(v)} for k, v in crossings.items()]
    finish_run(ctx, command, digest, [path], summary, series)

    for message in problems:
        log.error("verify: %s", message)
    if problems:
        return 1
    return 3 if all(r.error for r in rows) else 0


def handle_delay(args, ctx: RunContext) -> int:
    if args.points < 1:
        raise UsageError("Pump-power grid must not be empty (--points must be at least 1)")
    if not 0 < args.P_min_uW <= args.P_max_uW:
        raise UsageError("Pump range must satisfy 0 < --P-min-uW <= --P-max-uW")
    pumps = pump_grid_uW(args.P_min_uW, args.P_max_uW, args.points)
    return run_delay(ctx, "delay", pumps, args.kappa_over_gamma, "delay-sweep", args.outputs)


def handle_gain(args, ctx: RunContext) -> int:
    gains = sorted(set(args.kappa_over_gamma)) if args.kappa_over_gamma else gain_grid()
    power = args.P_L_uW * 1e-6 if args.P_L_uW is not None else ctx.config.P_L
    sweep = make_sweep(SweepAxis.GAIN_RATIO, gains, args.outputs)
    rows = run_gain_sweep(ctx.config, sweep, power, ctx.jobs)
    path = write_gain_csv(ctx.out_dir / "gain" / "gain.csv", rows, sweep.requested)
    labels = {}
    for r in rows:
        labels.setdefault(r.pt_label, []).append(r.kappa_over_gamma)
    digest = config_hash(ctx.config, "gain-sweep", {"kappa_over_gamma": list(gains), "P_L": power})
    finish_run(ctx, "gain-sweep", digest, [path],
               {"pt_labels": labels, "failed_points": sum(1 for r in rows if r.error)},
               [r.model_dump() for r in rows])
    return 3 if all(r.error for r in rows) else 0
