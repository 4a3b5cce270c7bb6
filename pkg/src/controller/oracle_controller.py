"""
Oracle Controller
`oracle-check`: time-domain demodulated eta against the frequency-domain solver
"""
import json
import logging

from ..services.artefact_service import config_hash, write_json
from ..services.tdsim_service import ORACLE_DETUNING_RATIOS, ORACLE_KAPPA_RATIOS, ORACLE_TOL, oracle_check
from .common import RunContext, finish_run

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("oracle-check", help="Time-domain cross-check of the transmission")
    p.add_argument("--kappa-over-gamma", dest="kappa_over_gamma", type=float, nargs="+",
                   default=list(ORACLE_KAPPA_RATIOS))
    p.add_argument("--delta-p-over-omega-m", dest="delta_p_over_omega_m", type=float, nargs="+",
                   default=list(ORACLE_DETUNING_RATIOS))
    p.add_argument("--tol", type=float, default=ORACLE_TOL, help="Relative tolerance on eta")
    p.set_defaults(handler=handle)


def handle(args, ctx: RunContext) -> int:
    points = oracle_check(ctx.config, args.kappa_over_gamma, args.delta_p_over_omega_m, ctx.jobs, args.tol)
    counts = {}
    for p in points:
        counts[p.status] = counts.get(p.status, 0) + 1
        if p.status in ("skipped", "unstable", "not-converged"):
            log.warning("oracle point kappa/gamma=%g Delta_p/omega_m=%g %s: %s",
                        p.kappa_over_gamma, p.delta_p_over_omega_m, p.status, p.detail)
    payload = {"threshold": args.tol, "counts": counts, "points": [p.model_dump() for p in points]}
    print(json.dumps(payload, indent=2))
    path = write_json(ctx.out_dir / "oracle.json", payload)
    digest = config_hash(ctx.config, "oracle-check", {"kappa_over_gamma": args.kappa_over_gamma,
                                                      "delta_p_over_omega_m": args.delta_p_over_omega_m,
                                                      "tol": args.tol})
    rows = [{"kappa_over_gamma": p.kappa_over_gamma, "delta_p_over_omega_m": p.delta_p_over_omega_m,
             "eta_freq": p.eta_freq, "eta_td": p.eta_td, "rel_err": p.rel_err, "status": p.status}
            for p in points]
    finish_run(ctx, "oracle-check", digest, [path], {"counts": counts}, rows)
    return 0 if counts.get("fail", 0) == 0 and counts.get("pass", 0) > 0 else 3
