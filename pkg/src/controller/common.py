"""
Shared plumbing of the CLI controllers: resolved run context, output
directory handling and run finalisation (manifest, PDF report, catalog).
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from ..dto.params import RunConfig
from ..dto.sweep import DEFAULT_OUTPUTS, OUTPUT_KINDS, RunManifest, SweepAxis
from ..services.artefact_service import build_manifest, write_manifest
from ..services.catalog_service import CatalogService
from ..services.pdf_report_service import PDFReportService
from ..services.params_service import load_config_file, resolve_config
from ..utils.errors import UsageError

log = logging.getLogger(__name__)


@dataclass
class RunContext:
    config: RunConfig
    out_dir: Path
    jobs: int
    verify: bool = False
    pdf: bool = False
    catalog: Optional[CatalogService] = None


def add_outputs_argument(parser, axis: SweepAxis) -> None:
    parser.add_argument("--outputs", nargs="+", choices=OUTPUT_KINDS, metavar="KIND",
                        help=f"Quantities to emit (default: {' '.join(DEFAULT_OUTPUTS[axis])})")


def parse_overrides(pairs: Optional[Sequence[str]]) -> Dict[str, float]:
    """KEY=VALUE pairs from --set"""
    overrides: Dict[str, float] = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--set expects KEY=VALUE, got '{pair}'")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--set {key}: '{value}' is not a number")
    return overrides


def build_context(args, catalog: Optional[CatalogService] = None) -> RunContext:
    file_values = load_config_file(args.config) if args.config else None
    # a config file without --preset must be complete on its own
    preset = args.preset or (None if args.config else "paper")
    config = resolve_config(preset=preset, file_values=file_values, overrides=parse_overrides(args.set))
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return RunContext(
        config=config,
        out_dir=Path(args.out),
        jobs=args.jobs,
        verify=args.verify,
        pdf=args.pdf,
        catalog=catalog,
    )


def finish_run(ctx: RunContext, command: str, digest: str, outputs: List[Path],
               summary: Optional[Dict[str, Any]] = None,
               series_rows: Sequence[Mapping[str, Any]] = ()) -> RunManifest:
    outputs = list(outputs)
    if ctx.pdf:
        report_path = ctx.out_dir / "report.pdf"
        outputs.append(report_path)
    manifest = build_manifest(command, digest, ctx.out_dir, outputs, summary)
    if ctx.pdf:
        PDFReportService().write_run_report(ctx.out_dir / "report.pdf", manifest, ctx.config, series_rows)
    write_manifest(ctx.out_dir, manifest)
    if ctx.catalog is not None:
        ctx.catalog.record(manifest)
    log.info("Wrote %d artefacts to %s (config hash %s)", len(outputs), ctx.out_dir, digest[:12])
    return manifest
