from pydantic import BaseModel, Field


class ProbeResponse(BaseModel):
    mu_plus: complex
    mu_minus: complex
    G1: complex
    G2: complex
    dx_plus: complex = Field(..., description="Mechanical sideband amplitude at exp(-i xi t), m")
    dx_minus: complex = Field(..., description="Mechanical sideband amplitude at exp(+i xi t), m")
    da1_plus: complex = Field(..., description="A: passive-resonator sideband at the probe frequency")
    da1_minus: complex
    da2_plus: complex
    da2_minus: complex
    t_amp: complex = Field(..., description="Probe transmission t(omega_p)")
    eta: float = Field(..., description="|t|^2")
    phase: float = Field(..., description="arg t in (-pi, pi]")

    model_config = {"frozen": True}


class SpectrumPoint(BaseModel):
    Delta_p: float
    eta: float
    phase: float
    t_re: float
    t_im: float

    model_config = {"frozen": True}
