"""
PT Controller
`pt-modes`: supermode eigenvalues and phase label as JSON
"""
import json
import logging

from ..services.artefact_service import config_hash, write_json
from ..services.params_service import config_with, derive_params
from ..services.pt_phase_service import classify, phase_boundary
from .common import RunContext, finish_run

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("pt-modes", help="Supermode eigenvalues and PT phase")
    p.add_argument("--kappa-over-gamma", dest="kappa_over_gamma", type=float, nargs="+",
                   help="Gain ratios (default: from the configuration)")
    p.set_defaults(handler=handle)


def _complex(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def handle(args, ctx: RunContext) -> int:
    system = ctx.config.system
    kappas = args.kappa_over_gamma or [system.kappa / system.gamma]
    boundary = phase_boundary(system.gamma, system.J_coupling)
    modes = []
    for k in kappas:
        sys = derive_params(config_with(ctx.config, kappa=k * system.gamma).system)
        pt = classify(sys, ctx.config.Delta_L)
        modes.append({
            "kappa_over_gamma": k,
            "lambda_plus": _complex(pt.lambda_plus),
            "lambda_minus": _complex(pt.lambda_minus),
            "discriminant": pt.discriminant,
            "phase_label": pt.phase_label.value,
            "unstable": pt.unstable,
        })
    payload = {
        "J_over_gamma": system.J_coupling / system.gamma,
        "kappa_critical_over_gamma": None if boundary is None else boundary / system.gamma,
        "modes": modes,
    }
    print(json.dumps(payload, indent=2))
    path = write_json(ctx.out_dir / "pt_modes.json", payload)
    digest = config_hash(ctx.config, "pt-modes", {"kappa_over_gamma": kappas})
    rows = [{"kappa_over_gamma": m["kappa_over_gamma"], "phase_label": m["phase_label"],
             "discriminant": m["discriminant"], "unstable": m["unstable"]} for m in modes]
    finish_run(ctx, "pt-modes", digest, [path],
               {"kappa_critical_over_gamma": payload["kappa_critical_over_gamma"]}, rows)
    return 0
