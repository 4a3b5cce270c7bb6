"""
Parameter service: derived quantities, drive amplitudes, presets and
configuration loading.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from pydantic import ValidationError

from ..dto.params import (
    DriveParams,
    PhysicalConstants,
    RawDriveParams,
    RawSystemParams,
    RunConfig,
    SystemParams,
)
from ..utils.errors import InvalidParameterError, UsageError

log = logging.getLogger(__name__)

DEFAULT_CONSTANTS = PhysicalConstants()

TWO_PI = 2.0 * math.pi

# Experimentally accessible parameter set of the compound resonator
PRESET_SYSTEM = {
    "omega_c": 1.93e14,
    "R": 34.5e-6,
    "omega_m": TWO_PI * 23.4e6,
    "m_eff": 5e-11,
    "gamma": 6.43e6,
    "kappa": 0.5 * 6.43e6,
    "Gamma_m": 2.4e5,
    "J_coupling": 6.43e6,
    "Q_c": 3e7,
    "Q_m": 150.0,
}
PRESET_P_L = 10e-6
DEFAULT_PROBE_RATIO = 1e-4

PRESETS = ("paper",)

RATIO_KEYS = ("kappa_over_gamma", "J_over_gamma", "Delta_L_over_omega_m", "P_L_uW")


def derive_params(raw: RawSystemParams, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> SystemParams:
    """Fill g_om = omega_c/R and x_zpf = sqrt(hbar/(2 m omega_m))"""
    for field in ("omega_c", "R", "omega_m", "m_eff", "gamma"):
        value = getattr(raw, field)
        if not (math.isfinite(value) and value > 0):
            raise InvalidParameterError(field, value)
    if not (math.isfinite(raw.Gamma_m) and raw.Gamma_m >= 0):
        raise InvalidParameterError("Gamma_m", raw.Gamma_m, "must be non-negative")
    if not (math.isfinite(raw.J_coupling) and raw.J_coupling >= 0):
        raise InvalidParameterError("J_coupling", raw.J_coupling, "must be non-negative")
    if not math.isfinite(raw.kappa):
        raise InvalidParameterError("kappa", raw.kappa, "must be finite")

    base = raw.raw() if isinstance(raw, SystemParams) else raw
    return SystemParams(
        **base.model_dump(),
        g_om=raw.omega_c / raw.R,
        x_zpf=math.sqrt(constants.hbar / (2.0 * raw.m_eff * raw.omega_m)),
    )


def field_amplitude(power: float, gamma: float, omega: float,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    return math.sqrt(2.0 * power * gamma / (constants.hbar * omega))


def drive_amplitudes(drive: RawDriveParams, sys: SystemParams,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS) -> DriveParams:
    """Detunings and field amplitudes from absolute pump/probe frequencies"""
    _check_drive(drive.P_L, drive.P_in, drive.omega_L, drive.omega_p)
    Delta_L = sys.omega_c - drive.omega_L
    Delta_p = drive.omega_p - sys.omega_c
    base = drive.model_dump(include={"P_L", "P_in", "omega_L", "omega_p"})
    return DriveParams(
        **base,
        Delta_L=Delta_L,
        Delta_p=Delta_p,
        xi=Delta_L + Delta_p,
        E_L=field_amplitude(drive.P_L, sys.gamma, drive.omega_L, constants),
        eps_p=field_amplitude(drive.P_in, sys.gamma, drive.omega_p, constants),
    )


def drive_at_detuning(sys: SystemParams, P_L: float, P_in: float, Delta_L: float, Delta_p: float,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> DriveParams:
    """
    Build a drive from detunings directly.

    Detunings are kept exactly as given; going through omega_p - omega_c would
    round them to the spacing of doubles near 1e14 rad/s.
    """
    omega_L = sys.omega_c - Delta_L
    omega_p = sys.omega_c + Delta_p
    _check_drive(P_L, P_in, omega_L, omega_p)
    return DriveParams(
        P_L=P_L,
        P_in=P_in,
        omega_L=omega_L,
        omega_p=omega_p,
        Delta_L=Delta_L,
        Delta_p=Delta_p,
        xi=Delta_L + Delta_p,
        E_L=field_amplitude(P_L, sys.gamma, omega_L, constants),
        eps_p=field_amplitude(P_in, sys.gamma, omega_p, constants),
    )


def with_probe_detuning(drive: DriveParams, sys: SystemParams, Delta_p: float,
                        constants: PhysicalConstants = DEFAULT_CONSTANTS) -> DriveParams:
    """Same pump, probe moved to a new detuning"""
    return drive_at_detuning(sys, drive.P_L, drive.P_in, drive.Delta_L, Delta_p, constants)


def with_probe_power(drive: DriveParams, sys: SystemParams, P_in: float,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS) -> DriveParams:
    return drive_at_detuning(sys, drive.P_L, P_in, drive.Delta_L, drive.Delta_p, constants)


def _check_drive(P_L: float, P_in: float, omega_L: float, omega_p: float) -> None:
    if not (math.isfinite(P_L) and P_L >= 0):
        raise InvalidParameterError("P_L", P_L, "must be non-negative")
    if not (math.isfinite(P_in) and P_in >= 0):
        raise InvalidParameterError("P_in", P_in, "must be non-negative")
    if not (math.isfinite(omega_L) and omega_L > 0):
        raise InvalidParameterError("omega_L", omega_L)
    if not (math.isfinite(omega_p) and omega_p > 0):
        raise InvalidParameterError("omega_p", omega_p)


def paper_config(**overrides: Any) -> RunConfig:
    """The built-in "paper" preset, optionally with flat overrides (ratio keys allowed)"""
    return resolve_config(preset="paper", overrides=overrides)


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise UsageError(f"Config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise UsageError(f"Config file {path} must contain a JSON object")
    return data


def resolve_config(preset: Optional[str] = "paper",
                   file_values: Optional[Mapping[str, Any]] = None,
                   overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Merge preset < config file < CLI overrides into a RunConfig.

    Ratio shorthands (kappa_over_gamma, J_over_gamma, Delta_L_over_omega_m,
    P_L_uW) are applied after the absolute values of the same layer.
    """
    values: Dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise UsageError(f"Unknown preset '{preset}'. Valid presets: {', '.join(PRESETS)}")
        values.update(PRESET_SYSTEM)
        values["P_L"] = PRESET_P_L
        values["Delta_L"] = PRESET_SYSTEM["omega_m"]

    for layer in (file_values or {}, overrides or {}):
        layer = {k: v for k, v in layer.items() if v is not None}
        if "omega_L" in layer:
            omega_c = layer.get("omega_c", values.get("omega_c"))
            if omega_c is None:
                raise UsageError("'omega_L' needs 'omega_c' to be set")
            layer = dict(layer)
            layer["Delta_L"] = omega_c - layer.pop("omega_L")
        values.update({k: v for k, v in layer.items() if k not in RATIO_KEYS})
        for key in RATIO_KEYS:
            if key in layer:
                _apply_ratio(values, key, float(layer[key]))

    system_fields = set(RawSystemParams.model_fields)
    run_fields = {"P_L", "P_in", "P_in_ratio", "Delta_L"}
    unknown = set(values) - system_fields - run_fields
    if unknown:
        raise UsageError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
    try:
        system = RawSystemParams(**{k: v for k, v in values.items() if k in system_fields})
        config = RunConfig(system=system, **{k: v for k, v in values.items() if k in run_fields})
    except ValidationError as e:
        raise UsageError(f"Incomplete or invalid configuration: {e}")
    derive_params(config.system)
    log.debug("Resolved configuration: %s", config.model_dump())
    return config


def _apply_ratio(values: Dict[str, Any], key: str, ratio: float) -> None:
    base = {"kappa_over_gamma": "gamma", "J_over_gamma": "gamma", "Delta_L_over_omega_m": "omega_m"}.get(key)
    if base is not None and base not in values:
        raise UsageError(f"'{key}' needs '{base}' to be set")
    if key == "kappa_over_gamma":
        values["kappa"] = ratio * values["gamma"]
    elif key == "J_over_gamma":
        values["J_coupling"] = ratio * values["gamma"]
    elif key == "Delta_L_over_omega_m":
        values["Delta_L"] = ratio * values["omega_m"]
    elif key == "P_L_uW":
        values["P_L"] = ratio * 1e-6


def build(config: RunConfig, P_L: Optional[float] = None, Delta_p: float = 0.0,
          constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """SystemParams and DriveParams for a config at one pump power and probe detuning"""
    sys = derive_params(config.system, constants)
    power = config.P_L if P_L is None else P_L
    drive = drive_at_detuning(sys, power, config.probe_power(power), config.Delta_L, Delta_p, constants)
    return sys, drive


def config_with(config: RunConfig, **system_updates: float) -> RunConfig:
    """Copy of a config with some system fields replaced"""
    system = config.system.model_copy(update=system_updates)
    return config.model_copy(update={"system": system})
