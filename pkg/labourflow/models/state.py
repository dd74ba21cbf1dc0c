"""Simulation state, parameter and trajectory models."""

import logging
import math
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import InputError
from .network import OccRegion


logger = logging.getLogger(__name__)

STOCHASTIC = "stochastic"
MEAN_FIELD = "meanfield"
MODES = (STOCHASTIC, MEAN_FIELD)


def months_to_steps(x_months: float, steps_per_year: int) -> int:
    """Number of timesteps covering ``x_months``; rounds up when not integral."""
    exact = x_months * steps_per_year / 12.0
    steps = int(math.ceil(exact - 1e-9))
    if abs(exact - steps) > 1e-9:
        logger.warning(
            f"{x_months} months is {exact:.3f} steps at {steps_per_year} steps/year; using {steps}"
        )
    return steps


@dataclass
class SimulationParams:
    """Parameters of the worker/vacancy dynamics."""
    delta_u: float = 0.009
    delta_v: float = 0.009
    gamma_u: float = 0.1
    gamma_v: float = 0.1
    steps_per_year: int = 12
    scale: float = 1.0
    seed: int = 0
    mode: str = STOCHASTIC
    applications_per_worker: int = 1
    burn_in_steps: int = 24
    initial_unemployment: float = 0.05
    age_thresholds_months: Tuple[int, ...] = (3, 6, 12)

    def __post_init__(self):
        self.age_thresholds_months = tuple(sorted(set(int(x) for x in self.age_thresholds_months)))
        self.validate()

    def validate(self):
        for name in ("delta_u", "delta_v"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InputError(f"{name} must be a probability, got {value}")
        for name in ("gamma_u", "gamma_v"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative")
        if self.scale < 1:
            raise InputError(f"scale must be >= 1, got {self.scale}")
        if self.steps_per_year < 1:
            raise InputError("steps_per_year must be >= 1")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.applications_per_worker < 1:
            raise InputError("applications_per_worker must be >= 1")
        if self.burn_in_steps < 0:
            raise InputError("burn_in_steps must be >= 0")
        if not 0.0 <= self.initial_unemployment:
            raise InputError("initial_unemployment must be non-negative")
        if not self.age_thresholds_months:
            raise InputError("at least one vacancy age threshold is required")

    @property
    def integer_mode(self) -> bool:
        return self.mode == STOCHASTIC

    @property
    def age_threshold_steps(self) -> Dict[int, int]:
        return {x: months_to_steps(x, self.steps_per_year) for x in self.age_thresholds_months}

    @property
    def age_cap(self) -> int:
        """Last age bucket; it holds every vacancy at least this many steps old."""
        return max(1, max(self.age_threshold_steps.values()))

    def with_seed(self, seed: int) -> 'SimulationParams':
        values = asdict(self)
        values['seed'] = seed
        return SimulationParams(**values)

    def to_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values['age_thresholds_months'] = list(self.age_thresholds_months)
        return values

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimulationParams':
        known = {name for name in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"Unknown simulation parameters: {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass
class LabourState:
    """Employed, unemployed and age-indexed vacancies per node.

    ``vacancy_ages[i, a]`` is the number of open vacancies at node ``i`` that
    have been open for ``a`` steps; the last column collects everything at or
    beyond the age cap.
    """
    employed: np.ndarray
    unemployed: np.ndarray
    vacancy_ages: np.ndarray
    t: int = 0

    @property
    def vacancies(self) -> np.ndarray:
        return self.vacancy_ages.sum(axis=1)

    @property
    def realised_demand(self) -> np.ndarray:
        return self.employed + self.vacancies

    @property
    def workers(self):
        return self.employed.sum() + self.unemployed.sum()

    def copy(self) -> 'LabourState':
        return LabourState(
            employed=self.employed.copy(),
            unemployed=self.unemployed.copy(),
            vacancy_ages=self.vacancy_ages.copy(),
            t=self.t,
        )

    def aged_vacancies(self, min_age: int) -> np.ndarray:
        return self.vacancy_ages[:, min_age:].sum(axis=1)


@dataclass
class FlowMatrix:
    """Hires per step: ``flows[i, j]`` workers from unemployment pool i hired at j."""
    flows: np.ndarray

    @property
    def hires_in(self) -> np.ndarray:
        return self.flows.sum(axis=0)

    @property
    def hires_out(self) -> np.ndarray:
        return self.flows.sum(axis=1)

    def total(self):
        return self.flows.sum()


@dataclass
class Trajectory:
    """Per-node time series recorded by a run.

    Arrays are indexed (timestep, node); timestep 0 is the first year anchor
    after burn-in. ``aged_vacancies`` maps a threshold in months to the count of
    vacancies at least that old.
    """
    scenario_id: str
    seed: int
    nodes: List[OccRegion]
    steps_per_year: int
    start_year: int
    employed: np.ndarray
    unemployed: np.ndarray
    vacancies: np.ndarray
    aged_vacancies: Dict[int, np.ndarray]
    separations: Optional[np.ndarray] = None
    openings: Optional[np.ndarray] = None
    hires: Optional[np.ndarray] = None
    flow_total: Optional[np.ndarray] = None
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return self.employed.shape[0]

    @property
    def years(self) -> List[int]:
        n_years = (self.n_steps - 1) // self.steps_per_year + 1
        return [self.start_year + k for k in range(n_years)]

    def anchor_step(self, year: int) -> int:
        return (year - self.start_year) * self.steps_per_year

    def window(self, start_year: Optional[int] = None, end_year: Optional[int] = None) -> np.ndarray:
        """Timesteps from the ``start_year`` anchor to the ``end_year`` anchor inclusive."""
        start_year = self.start_year if start_year is None else start_year
        end_year = self.years[-1] if end_year is None else end_year
        if start_year < self.start_year or end_year > self.years[-1] or start_year > end_year:
            raise InputError(
                f"Window {start_year}-{end_year} outside trajectory horizon "
                f"{self.start_year}-{self.years[-1]}"
            )
        first = self.anchor_step(start_year)
        last = min(self.anchor_step(end_year), self.n_steps - 1)
        return np.arange(first, last + 1)
