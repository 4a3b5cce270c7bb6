"""
Runs Controller
`runs`: recent entries of the run catalog
"""
import json

from ..utils.errors import UsageError
from .common import RunContext


def register(subparsers) -> None:
    p = subparsers.add_parser("runs", help="List recorded runs")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--config-hash", dest="config_hash", help="Filter by (a prefix of) the config hash")
    p.set_defaults(handler=handle)


def handle(args, ctx: RunContext) -> int:
    if ctx.catalog is None:
        raise UsageError("The run catalog is disabled (--no-catalog or PTOMIT_CATALOG=0)")
    runs = ctx.catalog.recent(args.limit, args.config_hash)
    print(json.dumps([r.model_dump(mode="json") for r in runs], indent=2))
    return 0
