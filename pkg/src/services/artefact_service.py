"""
CSV/JSON artefacts, config hashing, manifests and the --verify pass.

Floats are written with %.17g so a CSV read back reproduces the computed
doubles exactly; identical inputs therefore give byte-identical bodies.
"""
import csv
import hashlib
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from ..config import TOOL_VERSION
from ..dto.params import RunConfig
from ..dto.sweep import DEFAULT_OUTPUTS, DelayRow, GainRow, RunManifest, SweepAxis
from ..utils.errors import PhysicsError
from .params_service import build, config_with
from .response_service import group_delay, probe_response
from .steady_state_service import solve_steady_state
from .sweep_service import SpectrumSeries

log = logging.getLogger(__name__)

KEY_COLUMNS = {
    SweepAxis.DETUNING: ["delta_p_over_omega_m"],
    SweepAxis.PUMP_POWER: ["P_L_uW", "kappa_over_gamma"],
    SweepAxis.GAIN_RATIO: ["kappa_over_gamma"],
}
OUTPUT_COLUMNS = {
    "eta": ["eta"],
    "phase": ["phase_rad"],
    "tau_g": ["tau_g_s"],
    "pt_label": ["pt_label"],
    "steady_state": ["x_s_m", "n1"],
}
SPECTRUM_PHASE_COLUMNS = ["phase_rad", "t_re", "t_im"]
VERIFY_RTOL = 1e-12


def fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return "%.17g" % value


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(config: RunConfig, command: str, extra: Optional[Mapping[str, Any]] = None) -> str:
    """sha256 over the resolved inputs of a run"""
    payload = {"command": command, "config": config.model_dump(mode="json"), "extra": dict(extra or {})}
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def csv_columns(axis: SweepAxis, outputs: Optional[Sequence[str]] = None) -> List[str]:
    """Key columns of the axis followed by the columns of each requested output"""
    requested = DEFAULT_OUTPUTS[axis] if outputs is None else outputs
    columns = list(KEY_COLUMNS[axis])
    for kind in OUTPUT_COLUMNS:
        if kind in requested:
            if axis is SweepAxis.DETUNING and kind == "phase":
                columns.extend(SPECTRUM_PHASE_COLUMNS)
            else:
                columns.extend(OUTPUT_COLUMNS[kind])
    return columns


def _write_rows(path: Path, columns: List[str], rows: Iterable[Dict[str, str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_spectrum_csv(path: Path, series: SpectrumSeries, ratios: Sequence[float],
                       outputs: Optional[Sequence[str]] = None) -> Path:
    """One row per grid point; an `error` column appears only if some point failed"""
    has_errors = any(e is not None for e in series.errors)
    columns = csv_columns(SweepAxis.DETUNING, outputs) + (["error"] if has_errors else [])
    rows = []
    for ratio, point, error in zip(ratios, series.points, series.errors):
        row = {"delta_p_over_omega_m": fmt(ratio)}
        if point is not None:
            row.update(eta=fmt(point.eta), phase_rad=fmt(point.phase), t_re=fmt(point.t_re), t_im=fmt(point.t_im))
        if has_errors:
            row["error"] = error or ""
        rows.append(row)
    return _write_rows(path, columns, rows)


def _row_cells(row) -> Dict[str, str]:
    cells = {k: fmt(v) for k, v in row.model_dump(exclude={"pt_label", "error"}).items()}
    cells["pt_label"] = row.pt_label
    return cells


def write_delay_csv(path: Path, rows: Sequence[DelayRow], outputs: Optional[Sequence[str]] = None) -> Path:
    has_errors = any(r.error for r in rows)
    columns = csv_columns(SweepAxis.PUMP_POWER, outputs) + (["error"] if has_errors else [])
    out = []
    for r in rows:
        row = _row_cells(r)
        if has_errors:
            row["error"] = r.error or ""
        out.append(row)
    return _write_rows(path, columns, out)


def write_gain_csv(path: Path, rows: Sequence[GainRow], outputs: Optional[Sequence[str]] = None) -> Path:
    has_errors = any(r.error for r in rows)
    columns = csv_columns(SweepAxis.GAIN_RATIO, outputs) + (["error"] if has_errors else [])
    out = []
    for r in rows:
        row = _row_cells(r)
        if has_errors:
            row["error"] = r.error or ""
        out.append(row)
    return _write_rows(path, columns, out)


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def build_manifest(command: str, digest: str, out_dir: Path, outputs: Sequence[Path],
                   summary: Optional[Dict[str, Any]] = None) -> RunManifest:
    return RunManifest(
        command=command,
        config_hash=digest,
        tool_version=TOOL_VERSION,
        timestamp=utc_timestamp(),
        outputs=[Path(p).relative_to(out_dir).as_posix() for p in outputs],
        summary=summary or {},
    )


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    return write_json(out_dir / "manifest.json", manifest.model_dump(mode="json"))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _phase_gap(a: float, b: float) -> float:
    d = (a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def verify_spectrum_csv(path: Path, config: RunConfig, series: SpectrumSeries) -> List[str]:
    """Recompute every emitted eta and phase cell through probe_response; returns mismatch messages"""
    cfg = config_with(config, kappa=series.kappa_over_gamma * config.system.gamma, **series.system_overrides)
    sys, drive0 = build(cfg, P_L=series.P_L)
    ss = solve_steady_state(sys, drive0)
    problems = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            eta, phase = row.get("eta"), row.get("phase_rad")
            if not (eta or phase):
                continue
            ratio = float(row["delta_p_over_omega_m"])
            _, drive = build(cfg, P_L=series.P_L, Delta_p=ratio * sys.omega_m)
            resp = probe_response(sys, drive, ss)
            bad_eta = bool(eta) and _rel(float(eta), resp.eta) > VERIFY_RTOL
            bad_phase = bool(phase) and (
                _phase_gap(float(phase), resp.phase) > VERIFY_RTOL * max(abs(float(phase)), 1.0))
            if bad_eta or bad_phase:
                problems.append(f"{path.name}: row Delta_p/omega_m={ratio:g} differs from direct evaluation")
    return problems


def verify_delay_rows(config: RunConfig, rows: Sequence[DelayRow]) -> List[str]:
    problems = []
    for r in rows:
        if r.tau_g_s is None:
            continue
        cfg = config_with(config, kappa=r.kappa_over_gamma * config.system.gamma)
        sys, drive = build(cfg, P_L=r.P_L_uW * 1e-6)
        try:
            tau = group_delay(sys, drive)
        except PhysicsError as e:
            problems.append(f"P_L={r.P_L_uW:g} uW: {e.detail}")
            continue
        if _rel(r.tau_g_s, tau) > VERIFY_RTOL:
            problems.append(f"P_L={r.P_L_uW:g} uW, kappa/gamma={r.kappa_over_gamma:g}: tau_g differs on re-evaluation")
    return problems
