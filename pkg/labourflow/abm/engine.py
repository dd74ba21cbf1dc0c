"""Worker/vacancy dynamics: one step and full runs."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InputError, SimulationFault
from ..models.network import MobilityNetwork
from ..models.scenario import DemandScenario
from ..models.state import FlowMatrix, LabourState, SimulationParams, Trajectory
from .matching import applications, expected_flows, matching
from .processes import separations_and_openings


logger = logging.getLogger(__name__)

# mean-field rounding slack before a negative count counts as a fault
MEAN_FIELD_TOLERANCE = 1e-9


@dataclass
class StepResult:
    state: LabourState
    flows: FlowMatrix
    separations: np.ndarray
    openings: np.ndarray


def stochastic_round(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Round down, then up with probability equal to the fractional part."""
    values = np.asarray(values, dtype=np.float64)
    floor = np.floor(values)
    return (floor + (rng.random(values.shape) < values - floor)).astype(np.int64)


def initial_state(scenario: DemandScenario, params: SimulationParams,
                  rng: Optional[np.random.Generator] = None) -> LabourState:
    """Employment from the first target demand, u as a share of e, v = delta_v * e at age 0."""
    target = scenario.d_target[0] / params.scale
    n_nodes = len(target)
    n_ages = params.age_cap + 1
    if params.integer_mode:
        if rng is None:
            raise InputError("Stochastic initialization needs a random generator")
        employed = stochastic_round(target, rng)
        unemployed = np.rint(params.initial_unemployment * employed).astype(np.int64)
        vacancies = np.rint(params.delta_v * employed).astype(np.int64)
        ages = np.zeros((n_nodes, n_ages), dtype=np.int64)
    else:
        employed = target.astype(np.float64).copy()
        unemployed = params.initial_unemployment * employed
        vacancies = params.delta_v * employed
        ages = np.zeros((n_nodes, n_ages), dtype=np.float64)
    ages[:, 0] = vacancies
    return LabourState(employed=employed, unemployed=unemployed, vacancy_ages=ages, t=0)


def age_vacancies(remaining: np.ndarray, openings: np.ndarray) -> np.ndarray:
    """Survivors move up one age bucket (the last bucket accumulates); openings enter at age 0."""
    aged = np.zeros_like(remaining)
    aged[:, 1:] = remaining[:, :-1]
    aged[:, -1] += remaining[:, -1]
    aged[:, 0] += openings.astype(aged.dtype)
    return aged


def _check(name: str, values: np.ndarray, integer: bool, t: int) -> np.ndarray:
    floor = 0 if integer else -MEAN_FIELD_TOLERANCE * max(1.0, float(np.abs(values).max(initial=0.0)))
    if (values < floor).any():
        node = int(np.argmin(values))
        raise SimulationFault(f"Negative {name} ({values[node]}) at node {node}, step {t}")
    return values if integer else np.maximum(values, 0.0)


def step(state: LabourState, d_target: np.ndarray, network: MobilityNetwork,
         params: SimulationParams, rng: Optional[np.random.Generator] = None) -> StepResult:
    """Advance one timestep towards ``d_target`` (target demand at t+1).

    e' = e - b + hires in, u' = u + b - hires out, v' = v + c - hires in.
    Workers separated this step join their origin pool and can be hired at once.
    """
    if len(network) != len(state.employed):
        raise InputError(f"Network has {len(network)} nodes, state has {len(state.employed)}")

    separations, openings = separations_and_openings(state, d_target, params, rng)
    searching = LabourState(
        employed=state.employed - separations,
        unemployed=state.unemployed + separations,
        vacancy_ages=state.vacancy_ages,
        t=state.t,
    )

    if params.integer_mode:
        result = matching(applications(searching, network, params, rng), searching, rng)
        flows = result.flows
        remaining = state.vacancy_ages - result.filled_by_age
    else:
        expected, filled_fraction = expected_flows(searching.unemployed, searching.vacancies, network, params)
        flows = FlowMatrix(expected)
        remaining = state.vacancy_ages * (1.0 - filled_fraction)[:, None]

    hires_in = flows.hires_in
    hires_out = flows.hires_out
    integer = params.integer_mode
    t = state.t + 1
    employed = _check("employment", state.employed - separations + hires_in, integer, t)
    unemployed = _check("unemployment", state.unemployed + separations - hires_out, integer, t)
    remaining = _check("vacancies", remaining, integer, t)

    next_state = LabourState(
        employed=employed,
        unemployed=unemployed,
        vacancy_ages=age_vacancies(remaining, openings),
        t=t,
    )
    return StepResult(next_state, flows, separations, openings)


class TrajectoryRecorder:
    """Collects per-step arrays of a run."""

    def __init__(self, n_steps: int, n_nodes: int, params: SimulationParams):
        dtype = np.int64 if params.integer_mode else np.float64
        shape = (n_steps, n_nodes)
        self.employed = np.zeros(shape, dtype=dtype)
        self.unemployed = np.zeros(shape, dtype=dtype)
        self.vacancies = np.zeros(shape, dtype=dtype)
        self.separations = np.zeros(shape, dtype=dtype)
        self.openings = np.zeros(shape, dtype=dtype)
        self.hires = np.zeros(shape, dtype=dtype)
        self.flow_total = np.zeros((n_nodes, n_nodes), dtype=dtype)
        self.thresholds = params.age_threshold_steps
        self.aged = {months: np.zeros(shape, dtype=dtype) for months in self.thresholds}

    def record(self, t: int, state: LabourState, result: Optional[StepResult] = None):
        self.employed[t] = state.employed
        self.unemployed[t] = state.unemployed
        self.vacancies[t] = state.vacancies
        for months, steps in self.thresholds.items():
            self.aged[months][t] = state.aged_vacancies(steps)
        if result is not None:
            self.separations[t] = result.separations
            self.openings[t] = result.openings
            self.hires[t] = result.flows.hires_in
            self.flow_total += result.flows.flows


def run(initial: LabourState, scenario: DemandScenario, network: MobilityNetwork,
        params: SimulationParams, rng: Optional[np.random.Generator] = None) -> Trajectory:
    """Burn in under constant first-year demand, then step through the scenario horizon."""
    if rng is None and params.integer_mode:
        rng = np.random.default_rng(params.seed)
    targets = scenario.d_target / params.scale
    state = initial.copy()
    state.t = 0

    for _ in range(params.burn_in_steps):
        state = step(state, targets[0], network, params, rng).state
    state.t = 0

    recorder = TrajectoryRecorder(scenario.n_steps, len(network), params)
    recorder.record(0, state)
    for t in range(1, scenario.n_steps):
        result = step(state, targets[t], network, params, rng)
        state = result.state
        recorder.record(t, state, result)
        if t % (params.steps_per_year * 4) == 0:
            logger.debug(f"{scenario.scenario_id} seed {params.seed}: step {t}/{scenario.n_steps - 1}")

    return Trajectory(
        scenario_id=scenario.scenario_id,
        seed=params.seed,
        nodes=list(network.nodes),
        steps_per_year=scenario.steps_per_year,
        start_year=scenario.years[0],
        employed=recorder.employed,
        unemployed=recorder.unemployed,
        vacancies=recorder.vacancies,
        aged_vacancies=recorder.aged,
        separations=recorder.separations,
        openings=recorder.openings,
        hires=recorder.hires,
        flow_total=recorder.flow_total,
        params=params.to_dict(),
    )


def simulate(scenario: DemandScenario, network: MobilityNetwork, params: SimulationParams) -> Trajectory:
    """Initialize from the scenario and run with the generator seeded by ``params.seed``."""
    if scenario.steps_per_year != params.steps_per_year:
        raise InputError(
            f"Scenario has {scenario.steps_per_year} steps/year, parameters say {params.steps_per_year}"
        )
    rng = np.random.default_rng(params.seed) if params.integer_mode else None
    return run(initial_state(scenario, params, rng), scenario, network, params, rng)
