"""One-dimensional maximization of oscillatory functions of time."""

import math
from typing import Callable, Tuple

import numpy as np

from services.exceptions import InvalidInputError

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

# Grid maxima within this relative distance of the best one are all refined.
CANDIDATE_RTOL = 1e-3
# Refined maxima closer than this count as ties; the earliest time wins.
TIE_ATOL = 1e-9

VectorObjective = Callable[[np.ndarray], np.ndarray]


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-6
) -> Tuple[float, float]:
    """
    Golden-section search for the maximum of a unimodal f on [a, b].

    Returns (x, f(x)) with x the midpoint of the final bracket, whose width is <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc > yd:
        lo, hi = a, d
    else:
        lo, hi = c, b
    x = 0.5 * (lo + hi)
    return x, f(x)


def maximize_on_grid(
    objective: VectorObjective, t_max: float, grid: int, tol: float = 1e-6
) -> Tuple[float, float]:
    """
    Maximize objective(t) over t in (0, t_max].

    The objective is sampled on `grid` evenly spaced points t_max*i/grid, i = 1..grid;
    every local grid maximum within CANDIDATE_RTOL of the best sample is refined by
    golden-section search on its bracket to `tol`. Returns (t, value); among equal
    maxima the earliest time is returned.
    """
    if not (np.isfinite(t_max) and t_max > 0.0):
        raise InvalidInputError(f"t_max must be positive, got {t_max}")
    if grid < 2:
        raise InvalidInputError(f"grid must have at least 2 points, got {grid}")

    times = t_max * np.arange(1, grid + 1) / grid
    values = np.asarray(objective(times), dtype=float)
    best = float(values.max())

    # Local maxima of the sampled curve; the endpoints count if they beat their only neighbour.
    padded = np.concatenate(([-np.inf], values, [-np.inf]))
    is_peak = (padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:])
    threshold = best - CANDIDATE_RTOL * max(abs(best), 1e-300)
    candidates = np.flatnonzero(is_peak & (values >= threshold))

    def scalar(t: float) -> float:
        return float(objective(np.array([t]))[0])

    best_t, best_value = math.nan, -math.inf
    for index in candidates:
        lo = times[index - 1] if index > 0 else 0.0
        hi = times[index + 1] if index + 1 < grid else t_max
        t, value = golden_section_max(scalar, lo, hi, tol)
        if value < values[index]:
            t, value = float(times[index]), float(values[index])
        # Candidates come in time order, so a tie keeps the earlier peak.
        if value > best_value + TIE_ATOL:
            best_t, best_value = t, value

    return best_t, best_value
