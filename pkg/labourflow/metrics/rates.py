"""Window-averaged unemployment and unfilled-vacancy rates."""

from typing import Optional, Sequence

import numpy as np

from ..errors import InputError
from ..models.state import Trajectory


def _steps(trajectory: Trajectory, steps: Optional[Sequence[int]]) -> np.ndarray:
    if steps is None:
        return np.arange(trajectory.n_steps)
    steps = np.asarray(steps, dtype=np.int64)
    if steps.size == 0:
        raise InputError("Metric window is empty")
    if steps.min() < 0 or steps.max() >= trajectory.n_steps:
        raise InputError(f"Metric window exceeds the {trajectory.n_steps}-step trajectory")
    return steps


def ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    """Elementwise ratio; NaN marks a zero denominator."""
    numerator = np.asarray(numerator, dtype=np.float64)
    denominator = np.asarray(denominator, dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(denominator > 0, numerator / denominator, np.nan)


def avg_unemployment_rate(trajectory: Trajectory, steps: Optional[Sequence[int]] = None) -> np.ndarray:
    """sum_t u / sum_t (u + e) per node over the window; NaN where nobody works or searches."""
    steps = _steps(trajectory, steps)
    unemployed = trajectory.unemployed[steps].sum(axis=0, dtype=np.float64)
    employed = trajectory.employed[steps].sum(axis=0, dtype=np.float64)
    return ratio(unemployed, unemployed + employed)


def avg_vacancy_rate(trajectory: Trajectory, steps: Optional[Sequence[int]] = None,
                     x_months: int = 6) -> np.ndarray:
    """Vacancies open at least ``x_months``, summed over the window, over summed realised demand."""
    if x_months not in trajectory.aged_vacancies:
        available = ", ".join(str(x) for x in sorted(trajectory.aged_vacancies))
        raise InputError(f"Trajectory has no {x_months}-month vacancy ages (available: {available})")
    steps = _steps(trajectory, steps)
    aged = trajectory.aged_vacancies[x_months][steps].sum(axis=0, dtype=np.float64)
    demand = (trajectory.vacancies[steps].sum(axis=0, dtype=np.float64)
              + trajectory.employed[steps].sum(axis=0, dtype=np.float64))
    return ratio(aged, demand)
