"""
Command-line front end.

Exit codes: 0 success, 1 internal error or failed verification, 2 usage
error, 3 physics failure of every requested point.
"""
import argparse
import logging
import sys
from typing import List, Optional

from . import config
from .controller import (
    delay_controller,
    oracle_controller,
    pt_controller,
    reproduce_controller,
    runs_controller,
    spectrum_controller,
    steady_state_controller,
)
from .controller.common import build_context
from .services.catalog_service import CatalogService
from .services.params_service import PRESETS
from .utils.errors import PtomitError

log = logging.getLogger("ptomit")

CONTROLLERS = (
    spectrum_controller,
    delay_controller,
    pt_controller,
    oracle_controller,
    reproduce_controller,
    steady_state_controller,
    runs_controller,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptomit",
        description="Optomechanically induced transparency in gain/loss coupled resonators",
    )
    parser.add_argument("--config", help="JSON configuration file (SI units)")
    parser.add_argument("--preset", choices=PRESETS, help="Built-in parameter set (default: paper)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="Override a configuration value, e.g. kappa_over_gamma=1.5")
    parser.add_argument("--out", default=config.OUT_DIR, help="Output directory")
    parser.add_argument("--jobs", type=int, default=config.JOBS, help="Worker processes")
    parser.add_argument("--verify", action="store_true", help="Re-evaluate every emitted row")
    parser.add_argument("--pdf", action="store_true", help="Also write a tabular PDF run report")
    parser.add_argument("--no-catalog", action="store_true", help="Do not record the run in the catalog")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for controller in CONTROLLERS:
        controller.register(subparsers)
    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None, catalog: Optional[CatalogService] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    if catalog is None and config.CATALOG_ENABLED and not args.no_catalog:
        catalog = CatalogService()
    elif args.no_catalog:
        catalog = None

    try:
        ctx = build_context(args, catalog)
        return args.handler(args, ctx)
    except PtomitError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
