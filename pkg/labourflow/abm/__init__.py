from .engine import StepResult, age_vacancies, initial_state, run, simulate, step, stochastic_round
from .matching import Applications, MatchResult, applications, expected_flows, fill_probability, matching
from .processes import demand_gap, expected_separations_and_openings, separations_and_openings

__all__ = [
    "StepResult", "age_vacancies", "initial_state", "run", "simulate", "step", "stochastic_round",
    "Applications", "MatchResult", "applications", "expected_flows", "fill_probability", "matching",
    "demand_gap", "expected_separations_and_openings", "separations_and_openings",
]
