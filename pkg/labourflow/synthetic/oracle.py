"""Brute-force reference dynamics for tiny instances.

Written with plain Python loops over lists so that it shares no code path with
the vectorized engine it is checked against.
"""

from itertools import product
from typing import Dict, List, Sequence

from ..errors import InputError
from ..models.state import SimulationParams


MAX_ORACLE_NODES = 5


def enumerate_expected_hires(applicants: int, vacancies: int) -> float:
    """Expected hires when each applicant picks one of ``vacancies`` uniformly.

    Every vacancy with at least one applicant hires once, so the expectation is
    the mean number of distinct vacancies picked over all outcomes.
    """
    if applicants < 0 or vacancies < 0:
        raise InputError("Applicant and vacancy counts must be non-negative")
    if vacancies == 0 or applicants == 0:
        return 0.0
    if vacancies ** applicants > 10 ** 6:
        raise InputError(f"{vacancies}^{applicants} outcomes is too many to enumerate")
    outcomes = list(product(range(vacancies), repeat=applicants))
    return sum(len(set(outcome)) for outcome in outcomes) / len(outcomes)


def closed_form_hires(applicants: float, vacancies: float) -> float:
    """v * (1 - (1 - 1/v)^s); a lone vacancy is filled with probability min(1, s)."""
    if vacancies <= 0 or applicants <= 0:
        return 0.0
    if vacancies <= 1:
        return vacancies * min(1.0, applicants)
    return vacancies * (1.0 - (1.0 - 1.0 / vacancies) ** applicants)


def _check(matrix: Sequence[Sequence[float]], params: SimulationParams):
    if len(matrix) > MAX_ORACLE_NODES:
        raise InputError(f"Oracle handles at most {MAX_ORACLE_NODES} nodes, got {len(matrix)}")
    if params.applications_per_worker != 1:
        raise InputError("Oracle assumes one application per worker")


def oracle_step(matrix: Sequence[Sequence[float]], employed: List[float], unemployed: List[float],
                vacancies: List[float], target: List[float], params: SimulationParams):
    """One step of expected dynamics; returns (employed, unemployed, vacancies)."""
    n = len(matrix)
    separations, openings = [], []
    for i in range(n):
        gap = employed[i] + vacancies[i] - target[i]
        surplus, shortage = max(0.0, gap), max(0.0, -gap)
        separation = params.delta_u * employed[i] + (1.0 - params.delta_u) * params.gamma_u * surplus
        separations.append(min(employed[i], separation))
        openings.append(params.delta_v * employed[i] + (1.0 - params.delta_v) * params.gamma_v * shortage)

    pool = [unemployed[i] + separations[i] for i in range(n)]
    sent = [[0.0] * n for _ in range(n)]
    for i in range(n):
        weights = [matrix[i][j] * vacancies[j] for j in range(n)]
        total = sum(weights)
        if total > 0:
            sent[i] = [pool[i] * w / total for w in weights]

    hires = [[0.0] * n for _ in range(n)]
    for j in range(n):
        received = sum(sent[i][j] for i in range(n))
        if received <= 0:
            continue
        filled = closed_form_hires(received, vacancies[j])
        for i in range(n):
            hires[i][j] = sent[i][j] * filled / received

    hires_in = [sum(hires[i][j] for i in range(n)) for j in range(n)]
    hires_out = [sum(hires[i]) for i in range(n)]
    return (
        [employed[i] - separations[i] + hires_in[i] for i in range(n)],
        [unemployed[i] + separations[i] - hires_out[i] for i in range(n)],
        [vacancies[i] + openings[i] - hires_in[i] for i in range(n)],
    )


def mean_field_oracle(matrix: Sequence[Sequence[float]], employed: Sequence[float],
                      unemployed: Sequence[float], vacancies: Sequence[float],
                      targets: Sequence[Sequence[float]], params: SimulationParams,
                      burn_in_steps: int = 0) -> Dict[str, List[List[float]]]:
    """Expected e, u, v per step.

    ``targets[t]`` is the target demand the step into t aims at; burn-in steps
    aim at ``targets[0]``. Row 0 of the result is the state after burn-in.
    """
    _check(matrix, params)
    e, u, v = list(map(float, employed)), list(map(float, unemployed)), list(map(float, vacancies))
    for _ in range(burn_in_steps):
        e, u, v = oracle_step(matrix, e, u, v, list(targets[0]), params)
    history = {"employed": [e], "unemployed": [u], "vacancies": [v]}
    for t in range(1, len(targets)):
        e, u, v = oracle_step(matrix, e, u, v, list(targets[t]), params)
        history["employed"].append(e)
        history["unemployed"].append(u)
        history["vacancies"].append(v)
    return history
