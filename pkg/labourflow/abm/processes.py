"""Separations and vacancy openings: spontaneous plus state-dependent processes."""

from typing import Tuple

import numpy as np

from ..models.state import LabourState, SimulationParams


def demand_gap(state: LabourState, d_target: np.ndarray) -> np.ndarray:
    """Realised minus target demand, d - d_dagger."""
    return state.realised_demand - d_target


def expected_separations_and_openings(employed: np.ndarray, gap: np.ndarray,
                                      params: SimulationParams) -> Tuple[np.ndarray, np.ndarray]:
    """Mean separations b and openings c per node.

    b = delta_u * e + (1 - delta_u) * gamma_u * surplus, capped at e.
    c = delta_v * e + (1 - delta_v) * gamma_v * shortage, uncapped: a node may
    open more vacancies than it employs.
    """
    employed = np.asarray(employed, dtype=np.float64)
    surplus = np.maximum(0.0, gap)
    shortage = np.maximum(0.0, -gap)
    separations = params.delta_u * employed + (1.0 - params.delta_u) * params.gamma_u * surplus
    openings = params.delta_v * employed + (1.0 - params.delta_v) * params.gamma_v * shortage
    return np.minimum(separations, employed), openings


def separations_and_openings(state: LabourState, d_target: np.ndarray, params: SimulationParams,
                             rng: np.random.Generator = None) -> Tuple[np.ndarray, np.ndarray]:
    """Separations b and openings c for one step.

    Mean-field mode returns the expectations. Stochastic mode draws binomials
    over employed workers (positions) with probability
    min(1, delta + (1 - delta) * gamma * gap / max(e, 1)), so openings there are
    bounded by e; nodes without employment open ``ceil(gamma_v * shortage)``
    vacancies deterministically.
    """
    gap = demand_gap(state, d_target)
    if not params.integer_mode:
        return expected_separations_and_openings(state.employed, gap, params)

    employed = state.employed.astype(np.int64)
    safe = np.maximum(employed, 1).astype(np.float64)
    surplus = np.maximum(0.0, gap)
    shortage = np.maximum(0.0, -gap)

    p_separate = np.minimum(1.0, params.delta_u + (1.0 - params.delta_u) * params.gamma_u * surplus / safe)
    p_open = np.minimum(1.0, params.delta_v + (1.0 - params.delta_v) * params.gamma_v * shortage / safe)

    separations = rng.binomial(employed, p_separate)
    openings = rng.binomial(employed, p_open)
    idle = employed == 0
    if idle.any():
        openings[idle] = np.ceil(params.gamma_v * shortage[idle] - 1e-12).astype(np.int64)
    return separations.astype(np.int64), openings.astype(np.int64)
