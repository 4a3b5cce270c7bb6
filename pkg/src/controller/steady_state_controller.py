"""
Steady State Controller
`steady-state`: operating point, every real root of the cubic and PT label
"""
import json

from ..services.artefact_service import config_hash, write_json
from ..services.params_service import build
from ..services.pt_phase_service import classify
from ..services.steady_state_service import steady_state_report
from .common import RunContext, finish_run


def register(subparsers) -> None:
    p = subparsers.add_parser("steady-state", help="Self-consistent operating point")
    p.add_argument("--P-L-uW", dest="P_L_uW", type=float, help="Pump power in microwatts")
    p.set_defaults(handler=handle)


def handle(args, ctx: RunContext) -> int:
    power = args.P_L_uW * 1e-6 if args.P_L_uW is not None else ctx.config.P_L
    sys, drive = build(ctx.config, P_L=power)
    report = steady_state_report(sys, drive)
    ss = report.steady_state
    pt = classify(sys, drive.Delta_L)
    payload = {
        "P_L": power,
        "steady_state": {
            "x_s": ss.x_s,
            "a1_s": {"re": ss.a1_s.real, "im": ss.a1_s.imag},
            "a2_s": {"re": ss.a2_s.real, "im": ss.a2_s.imag},
            "n1": ss.n1,
            "n2": ss.n2,
            "residual": ss.residual,
        },
        "all_real_roots": report.all_real_roots,
        "pt_label": pt.phase_label.value,
        "unstable": pt.unstable,
    }
    print(json.dumps(payload, indent=2))
    path = write_json(ctx.out_dir / "steady_state.json", payload)
    digest = config_hash(ctx.config, "steady-state", {"P_L": power})
    finish_run(ctx, "steady-state", digest, [path], {"x_s": ss.x_s, "n1": ss.n1, "roots": len(report.all_real_roots)})
    return 0
