"""PT-phase classification of the two coupled optical modes."""
import cmath
import logging
from typing import Optional

from ..dto.params import SystemParams
from ..dto.pt import PtClassification, PtPhase

log = logging.getLogger(__name__)

EXCEPTIONAL_TOL = 1e-9


def discriminant(gamma: float, kappa: float, J: float) -> float:
    half_sum = 0.5 * (kappa + gamma)
    return J * J - half_sum * half_sum


def classify(sys: SystemParams, Delta_L: float) -> PtClassification:
    """
    Eigenvalues of [[-(gamma + i Delta_L), iJ], [iJ, kappa - i Delta_L]].

    lambda = -i Delta_L + (kappa - gamma)/2 +- sqrt(-disc), disc = J^2 - ((kappa + gamma)/2)^2
    """
    disc = discriminant(sys.gamma, sys.kappa, sys.J_coupling)
    center = complex(0.5 * (sys.kappa - sys.gamma), -Delta_L)
    split = cmath.sqrt(complex(-disc, 0.0))
    lambda_plus, lambda_minus = center + split, center - split

    tol = EXCEPTIONAL_TOL * sys.gamma ** 2
    if disc > tol:
        label = PtPhase.SYMMETRIC
    elif disc < -tol:
        label = PtPhase.BROKEN
    else:
        label = PtPhase.EXCEPTIONAL

    unstable = max(lambda_plus.real, lambda_minus.real) >= 0.0
    if unstable:
        log.debug("Optical supermodes are linearly unstable (max Re lambda = %.6g rad/s, kappa/gamma=%g)",
                    max(lambda_plus.real, lambda_minus.real), sys.kappa / sys.gamma)
    return PtClassification(
        lambda_plus=lambda_plus,
        lambda_minus=lambda_minus,
        discriminant=disc,
        phase_label=label,
        unstable=unstable,
    )


def phase_boundary(gamma: float, J: float) -> Optional[float]:
    """Gain kappa at which the discriminant vanishes; None when no boundary exists at kappa >= 0"""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if J < 0:
        raise ValueError("J must be non-negative")
    kappa_critical = 2.0 * J - gamma
    if kappa_critical < 0:
        return None
    return kappa_critical


def max_growth_rate(classification: PtClassification) -> float:
    return max(classification.lambda_plus.real, classification.lambda_minus.real)
