"""Economy-wide series: aggregate rates per step and reallocation per year."""

from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
import pandas as pd

from ..errors import InputError
from ..models.state import Trajectory
from .rates import ratio


@dataclass
class AggregateSeries:
    per_step: pd.DataFrame
    per_year: pd.DataFrame


def yearly_reallocation(trajectory: Trajectory) -> pd.DataFrame:
    """Employment gained (and lost) summed over nodes between consecutive year anchors."""
    rows = []
    years = trajectory.years
    for previous, year in zip(years, years[1:]):
        change = (trajectory.employed[trajectory.anchor_step(year)].astype(np.float64)
                  - trajectory.employed[trajectory.anchor_step(previous)])
        rows.append({
            "year": year,
            "jobs_gained": float(change[change > 0].sum()),
            "jobs_lost": float(-change[change < 0].sum()),
        })
    return pd.DataFrame(rows, columns=["year", "jobs_gained", "jobs_lost"])


def aggregate_series(trajectory: Trajectory) -> AggregateSeries:
    employed = trajectory.employed.sum(axis=1, dtype=np.float64)
    unemployed = trajectory.unemployed.sum(axis=1, dtype=np.float64)
    vacancies = trajectory.vacancies.sum(axis=1, dtype=np.float64)
    per_step = pd.DataFrame({
        "timestep": np.arange(trajectory.n_steps),
        "employed": employed,
        "unemployed": unemployed,
        "vacancies": vacancies,
        "unemployment_rate": ratio(unemployed, unemployed + employed),
        "vacancy_rate": ratio(vacancies, vacancies + employed),
    })
    return AggregateSeries(per_step=per_step, per_year=yearly_reallocation(trajectory))


def mean_series(series: Iterable[AggregateSeries]) -> AggregateSeries:
    """Ensemble mean of per-seed aggregate series."""
    series: List[AggregateSeries] = list(series)
    if not series:
        raise InputError("No aggregate series to average")
    per_step = pd.concat([s.per_step for s in series]).groupby("timestep", sort=True).mean().reset_index()
    per_year = pd.concat([s.per_year for s in series]).groupby("year", sort=True).mean().reset_index()
    return AggregateSeries(per_step=per_step, per_year=per_year)
