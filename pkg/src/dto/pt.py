from enum import Enum

from pydantic import BaseModel, Field


class PtPhase(str, Enum):
    SYMMETRIC = "symmetric"
    BROKEN = "broken"
    EXCEPTIONAL = "exceptional"


class PtClassification(BaseModel):
    lambda_plus: complex
    lambda_minus: complex
    discriminant: float = Field(..., description="J^2 - ((kappa+gamma)/2)^2, (rad/s)^2")
    phase_label: PtPhase
    unstable: bool = Field(..., description="max Re(lambda) >= 0")

    model_config = {"frozen": True}
