from typing import List

from pydantic import BaseModel, Field


class CubicPoly(BaseModel):
    """c3 x^3 + c2 x^2 + c1 x + c0 in the static displacement x (SI)"""
    c3: float
    c2: float
    c1: float
    c0: float

    model_config = {"frozen": True}

    def __call__(self, x: float) -> float:
        return ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0

    def derivative(self, x: float) -> float:
        return (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1


class SteadyState(BaseModel):
    x_s: float = Field(..., description="Static mechanical displacement, m")
    a1_s: complex = Field(..., description="Intracavity amplitude, passive resonator")
    a2_s: complex = Field(..., description="Intracavity amplitude, gain resonator")
    n1: float = Field(..., description="|a1_s|^2")
    n2: float = Field(..., description="|a2_s|^2")
    residual: float = Field(..., description="Max relative defect of the steady-state equations")

    model_config = {"frozen": True}


class SteadyStateReport(BaseModel):
    """Selected branch plus every real root, for inspection"""
    steady_state: SteadyState
    all_real_roots: List[float]
