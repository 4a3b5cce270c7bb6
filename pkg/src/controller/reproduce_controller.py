"""
Reproduce Controller
`reproduce <figure_id>`: the dataset bundle of one figure on the paper preset
"""
import logging

from ..services.artefact_service import config_hash
from ..services.params_service import resolve_config
from ..services.sweep_service import FIGURES, detuning_ratios, figure_spec, pump_grid_uW, reproduce_spectra, series_summary
from .common import RunContext, finish_run
from .delay_controller import run_delay
from .spectrum_controller import exit_status, write_series

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("reproduce", help="Dataset bundle for one figure")
    p.add_argument("figure_id", help=f"One of: {', '.join(FIGURES)}")
    p.set_defaults(handler=handle)


def handle(args, ctx: RunContext) -> int:
    spec = figure_spec(args.figure_id)
    ctx.config = resolve_config(preset="paper")
    if spec.kind == "delay":
        return run_delay(ctx, args.figure_id, pump_grid_uW(), spec.gain_ratios, f"reproduce {args.figure_id}")

    ratios = detuning_ratios()
    series = reproduce_spectra(ctx.config, spec, ratios, ctx.jobs)
    outputs, problems = write_series(ctx, args.figure_id, series, ratios)
    rows = [series_summary(s) for s in series]
    digest = config_hash(ctx.config, f"reproduce {args.figure_id}", {"series": [s.name for s in spec.series]})
    finish_run(ctx, f"reproduce {args.figure_id}", digest, outputs,
               {"series": len(series), "verified": ctx.verify}, rows)
    return exit_status(series, problems)
