import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class SweepAxis(str, Enum):
    DETUNING = "detuning"
    PUMP_POWER = "pump_power"
    GAIN_RATIO = "gain_ratio"


# canonical column order follows this tuple
OUTPUT_KINDS = ("eta", "phase", "tau_g", "pt_label", "steady_state")

AXIS_OUTPUTS: Dict[SweepAxis, Tuple[str, ...]] = {
    SweepAxis.DETUNING: ("eta", "phase"),
    SweepAxis.PUMP_POWER: ("tau_g", "pt_label", "steady_state"),
    SweepAxis.GAIN_RATIO: ("eta", "phase", "tau_g", "pt_label", "steady_state"),
}

DEFAULT_OUTPUTS: Dict[SweepAxis, Tuple[str, ...]] = {
    SweepAxis.DETUNING: ("eta", "phase"),
    SweepAxis.PUMP_POWER: ("tau_g", "pt_label"),
    SweepAxis.GAIN_RATIO: ("eta", "phase", "tau_g", "pt_label"),
}


class SweepSpec(BaseModel):
    axis: SweepAxis
    values: List[float]
    outputs: Optional[List[str]] = Field(None, description="Requested quantities; None selects the axis default")

    model_config = {"frozen": True}

    @field_validator("values")
    @classmethod
    def check_values(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("sweep values must not be empty")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("sweep values must be finite")
        steps = [b - a for a, b in zip(values, values[1:])]
        if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ValueError("sweep values must be strictly monotone")
        return values

    @field_validator("outputs")
    @classmethod
    def check_outputs(cls, outputs: Optional[List[str]]) -> Optional[List[str]]:
        if outputs is None:
            return None
        if not outputs:
            raise ValueError("requested outputs must not be empty")
        unknown = set(outputs) - set(OUTPUT_KINDS)
        if unknown:
            raise ValueError(f"unknown outputs: {sorted(unknown)}")
        return outputs

    @model_validator(mode="after")
    def check_outputs_for_axis(self) -> "SweepSpec":
        if self.outputs is not None:
            unsupported = set(self.outputs) - set(AXIS_OUTPUTS[self.axis])
            if unsupported:
                raise ValueError(f"outputs {sorted(unsupported)} are not available along {self.axis.value}")
        return self

    @property
    def requested(self) -> Tuple[str, ...]:
        """Requested outputs in canonical order"""
        chosen = DEFAULT_OUTPUTS[self.axis] if self.outputs is None else self.outputs
        return tuple(kind for kind in OUTPUT_KINDS if kind in chosen)


class RunManifest(BaseModel):
    command: str
    config_hash: str
    tool_version: str
    timestamp: str
    outputs: List[str] = Field(default_factory=list)
    summary: Dict[str, object] = Field(default_factory=dict)


class DelayRow(BaseModel):
    P_L_uW: float
    kappa_over_gamma: float
    tau_g_s: Optional[float] = None
    pt_label: str
    x_s_m: Optional[float] = None
    n1: Optional[float] = None
    error: Optional[str] = None


class GainRow(BaseModel):
    kappa_over_gamma: float
    eta: Optional[float] = None
    phase_rad: Optional[float] = None
    tau_g_s: Optional[float] = None
    pt_label: str
    x_s_m: Optional[float] = None
    n1: Optional[float] = None
    error: Optional[str] = None
