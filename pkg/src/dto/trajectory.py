from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field


class TrajectoryState(BaseModel):
    x: float = Field(0.0, description="Mechanical displacement, m")
    v: float = Field(0.0, description="Mechanical velocity dx/dt, m/s")
    a1: complex = Field(0j, description="Passive-resonator amplitude, pump rotating frame")
    a2: complex = Field(0j, description="Gain-resonator amplitude, pump rotating frame")

    model_config = {"frozen": True}


@dataclass(frozen=True)
class Trajectory:
    """Samples of an integrated run; times in seconds, fields in SI"""
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


class DemodResult(BaseModel):
    da1_plus_est: complex
    t_est: complex
    eta_est: float
    rel_err_vs_freq_domain: Optional[float] = None

    model_config = {"frozen": True}


class OraclePoint(BaseModel):
    kappa_over_gamma: float
    delta_p_over_omega_m: float
    Delta_p: float
    eta_freq: float
    eta_td: Optional[float] = None
    rel_err: Optional[float] = None
    status: str = Field(..., description="pass, fail, skipped, unstable or not-converged")
    detail: Optional[str] = None
