"""Per-timestep target demand from yearly anchors."""

import logging
from typing import Dict, List

import numpy as np

from ..errors import InputError
from ..models.network import OccRegion
from ..models.scenario import DemandScenario, DemandTable
from .demand import demand_matrix, scenario_ids


logger = logging.getLogger(__name__)


def check_consecutive(years: List[int]) -> None:
    if not years:
        raise InputError("No demand years")
    gaps = [year for prev, year in zip(years, years[1:]) if year != prev + 1]
    if gaps:
        raise InputError(f"Gap in demand years before {gaps[0]}: years must be consecutive")


def interpolate_demand(D_star: np.ndarray, years: List[int], steps_per_year: int) -> np.ndarray:
    """Linear interpolation between yearly anchors.

    Year k is anchored at timestep ``k * steps_per_year``; the final year is the
    last timestep, so there are ``(len(years) - 1) * steps_per_year + 1`` steps.
    """
    if steps_per_year < 1:
        raise InputError(f"steps_per_year must be >= 1, got {steps_per_year}")
    check_consecutive(years)
    D_star = np.asarray(D_star, dtype=np.float64)
    if D_star.shape[0] != len(years):
        raise InputError("Demand rows do not match the year list")

    n_years, n_nodes = D_star.shape
    d_target = np.empty(((n_years - 1) * steps_per_year + 1, n_nodes))
    offsets = np.arange(steps_per_year, dtype=np.float64)
    for k in range(n_years - 1):
        start, end = D_star[k], D_star[k + 1]
        segment = start[None, :] + (end - start)[None, :] * offsets[:, None] / steps_per_year
        low, high = np.minimum(start, end), np.maximum(start, end)
        d_target[k * steps_per_year:(k + 1) * steps_per_year] = np.clip(segment, low, high)
    d_target[-1] = D_star[-1]
    return d_target


def build_scenarios(table: DemandTable, nodes: List[OccRegion], steps_per_year: int,
                    start_year: int = None, end_year: int = None) -> Dict[str, DemandScenario]:
    """DemandScenario per scenario over the network's node order, clipped to the horizon."""
    scenarios = {}
    for scenario_id in scenario_ids(table):
        values = table[scenario_id]
        years = sorted({year for _, year in values})
        if start_year is not None:
            years = [year for year in years if year >= start_year]
        if end_year is not None:
            years = [year for year in years if year <= end_year]
        check_consecutive(years)
        if start_year is not None and years[0] != start_year:
            raise InputError(f"Scenario {scenario_id!r} starts in {years[0]}, not {start_year}")
        if end_year is not None and years[-1] != end_year:
            raise InputError(f"Scenario {scenario_id!r} ends in {years[-1]}, not {end_year}")

        D_star = demand_matrix(values, nodes, years)
        scenarios[scenario_id] = DemandScenario(
            scenario_id=scenario_id,
            nodes=list(nodes),
            years=years,
            D_star=D_star,
            steps_per_year=steps_per_year,
            d_target=interpolate_demand(D_star, years, steps_per_year),
        )
        logger.debug(f"Scenario {scenario_id}: {len(years)} years, {scenarios[scenario_id].n_steps} steps")
    return scenarios
