from typing import Optional

from pydantic import BaseModel, Field
from scipy.constants import hbar as CODATA_HBAR


class PhysicalConstants(BaseModel):
    hbar: float = Field(CODATA_HBAR, description="Reduced Planck constant, J*s")

    model_config = {"frozen": True}


class RawSystemParams(BaseModel):
    """
    Resonator and mechanical parameters as supplied by the user.
    All rates and frequencies are angular, rad/s.
    """
    omega_c: float = Field(..., description="Optical resonance angular frequency, rad/s")
    R: float = Field(..., description="Resonator radius, m")
    omega_m: float = Field(..., description="Mechanical angular frequency, rad/s")
    m_eff: float = Field(..., description="Effective mass, kg")
    gamma: float = Field(..., description="Passive-resonator loss rate, rad/s")
    kappa: float = Field(..., description="Gain (>0) or loss (<0) of the second resonator, rad/s")
    Gamma_m: float = Field(..., description="Mechanical damping rate, rad/s")
    J_coupling: float = Field(..., description="Inter-resonator tunneling rate, rad/s")
    Q_c: Optional[float] = Field(None, description="Optical quality factor (stored only)")
    Q_m: Optional[float] = Field(None, description="Mechanical quality factor (stored only)")

    model_config = {"frozen": True, "extra": "forbid"}


class SystemParams(RawSystemParams):
    g_om: float = Field(..., description="Optomechanical coupling omega_c/R, rad/(s*m)")
    x_zpf: float = Field(..., description="Zero-point length sqrt(hbar/(2 m omega_m)), m")

    def raw(self) -> RawSystemParams:
        return RawSystemParams(**self.model_dump(exclude={"g_om", "x_zpf"}))


class RawDriveParams(BaseModel):
    P_L: float = Field(..., description="Pump power, W")
    P_in: float = Field(..., description="Probe power, W")
    omega_L: float = Field(..., description="Pump angular frequency, rad/s")
    omega_p: float = Field(..., description="Probe angular frequency, rad/s")

    model_config = {"frozen": True, "extra": "forbid"}


class DriveParams(RawDriveParams):
    Delta_L: float = Field(..., description="Pump detuning omega_c - omega_L, rad/s")
    Delta_p: float = Field(..., description="Probe detuning omega_p - omega_c, rad/s")
    xi: float = Field(..., description="Probe-pump detuning omega_p - omega_L, rad/s")
    E_L: float = Field(..., description="Pump field amplitude")
    eps_p: float = Field(..., description="Probe field amplitude")


class RunConfig(BaseModel):
    """Fully resolved inputs of a run; the config hash is taken over this"""
    system: RawSystemParams
    P_L: float = Field(..., description="Pump power, W")
    P_in: Optional[float] = Field(None, description="Probe power, W; defaults to P_in_ratio * P_L")
    P_in_ratio: float = Field(1e-4, description="Probe/pump power ratio used when P_in is unset")
    Delta_L: float = Field(..., description="Pump detuning, rad/s")

    model_config = {"frozen": True, "extra": "forbid"}

    def probe_power(self, P_L: Optional[float] = None) -> float:
        if self.P_in is not None:
            return self.P_in
        return self.P_in_ratio * (self.P_L if P_L is None else P_L)
