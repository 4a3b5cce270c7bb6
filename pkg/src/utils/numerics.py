"""Small numeric helpers shared by the services"""
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.signal import argrelextrema


def real_cubic_roots(c3: float, c2: float, c1: float, c0: float) -> List[float]:
    """
    Real roots of c3 x^3 + c2 x^2 + c1 x + c0, sorted ascending.

    Closed form (trigonometric when three roots are real, Cardano otherwise)
    followed by one Newton step per root. Lower-degree polynomials are handled
    when the leading coefficients vanish.
    """
    if c3 == 0.0:
        if c2 == 0.0:
            if c1 == 0.0:
                return []
            return [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        sq = math.sqrt(disc)
        # numerically stable quadratic
        q = -0.5 * (c1 + math.copysign(sq, c1))
        roots = [q / c2]
        if q != 0.0:
            roots.append(c0 / q)
        else:
            roots.append(0.0)
        return sorted(roots)

    a, b, c = c2 / c3, c1 / c3, c0 / c3
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    disc = -(4.0 * p ** 3 + 27.0 * q * q)

    if p == 0.0 and q == 0.0:
        ys = [0.0]
    elif disc > 0.0:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ys = [r * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        sq = math.sqrt(max(q * q / 4.0 + p ** 3 / 27.0, 0.0))
        u = float(np.cbrt(-q / 2.0 - math.copysign(sq, q)))
        w = -p / (3.0 * u) if u != 0.0 else 0.0
        ys = [u + w]

    roots = []
    for y in ys:
        x = y + shift
        f = ((c3 * x + c2) * x + c1) * x + c0
        df = (3.0 * c3 * x + 2.0 * c2) * x + c1
        if df != 0.0:
            x -= f / df
        roots.append(x)
    return sorted(roots)


def local_maxima(values: Sequence[float]) -> np.ndarray:
    """Indices of strict 3-point local maxima"""
    return argrelextrema(np.asarray(values, dtype=float), np.greater)[0]


def local_minima(values: Sequence[float]) -> np.ndarray:
    return argrelextrema(np.asarray(values, dtype=float), np.less)[0]


def unwrap_anchored(phases: Sequence[float], anchor: int) -> np.ndarray:
    """Unwrap along the sequence, then shift so phases[anchor] keeps its principal value"""
    unwrapped = np.unwrap(np.asarray(phases, dtype=float))
    offset = unwrapped[anchor] - phases[anchor]
    return unwrapped - 2.0 * np.pi * np.round(offset / (2.0 * np.pi))


def sign_changes(xs: Sequence[float], ys: Sequence[float]) -> List[Tuple[float, str]]:
    """
    Zero crossings of ys over xs, located by linear interpolation.
    Each entry is (x_crossing, "+-" or "-+"). Exact zeros count as no sign.
    """
    crossings = []
    prev_x, prev_y = None, None
    for x, y in zip(xs, ys):
        if y is None or not math.isfinite(y) or y == 0.0:
            continue
        if prev_y is not None and (prev_y > 0) != (y > 0):
            x0 = prev_x - prev_y * (x - prev_x) / (y - prev_y)
            crossings.append((x0, "+-" if prev_y > 0 else "-+"))
        prev_x, prev_y = x, y
    return crossings
