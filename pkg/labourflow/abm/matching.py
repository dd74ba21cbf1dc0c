"""Network-directed job search and worker-vacancy matching."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..models.network import MobilityNetwork
from ..models.state import FlowMatrix, LabourState, SimulationParams


@dataclass
class Applications:
    """Applications of one step.

    Workers are numbered 0..n-1 with ``worker_origin`` giving each worker's
    unemployment pool; ``worker[k]`` and ``target[k]`` describe application k.
    """
    worker_origin: np.ndarray
    worker: np.ndarray
    target: np.ndarray

    def __len__(self) -> int:
        return len(self.target)

    def counts(self, n_nodes: int) -> np.ndarray:
        """Applications per (origin, target) pair."""
        counts = np.zeros((n_nodes, n_nodes), dtype=np.int64)
        np.add.at(counts, (self.worker_origin[self.worker], self.target), 1)
        return counts


@dataclass
class MatchResult:
    """Hires per (origin, destination) and filled vacancies per (node, age)."""
    flows: FlowMatrix
    filled_by_age: np.ndarray


def search_weights(network: MobilityNetwork, vacancies: np.ndarray) -> np.ndarray:
    """Row-normalized A[i, j] * v[j]; rows with no open neighbour are all zero."""
    weighted = network.matrix * np.asarray(vacancies, dtype=np.float64)[None, :]
    totals = weighted.sum(axis=1, keepdims=True)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(totals > 0, weighted / totals, 0.0)


def applications(state: LabourState, network: MobilityNetwork, params: SimulationParams,
                 rng: np.random.Generator) -> Applications:
    """Every unemployed worker sends ``applications_per_worker`` applications.

    Targets are drawn with probability proportional to A[i, j] * v[j]; workers
    whose neighbours have no open vacancy send none.
    """
    pool = state.unemployed.astype(np.int64)
    per_worker = params.applications_per_worker
    probabilities = search_weights(network, state.vacancies)
    n_nodes = len(pool)

    worker_origin = np.repeat(np.arange(n_nodes), pool)
    offsets = np.concatenate(([0], np.cumsum(pool)))
    workers, targets = [], []
    for origin in range(n_nodes):
        if pool[origin] == 0:
            continue
        row = probabilities[origin]
        if row.sum() <= 0:
            continue
        n_apps = int(pool[origin]) * per_worker
        workers.append(np.repeat(np.arange(offsets[origin], offsets[origin + 1]), per_worker))
        targets.append(rng.choice(n_nodes, size=n_apps, p=row / row.sum()))

    if workers:
        return Applications(worker_origin, np.concatenate(workers), np.concatenate(targets))
    empty = np.zeros(0, dtype=np.int64)
    return Applications(worker_origin, empty, empty)


def matching(apps: Applications, state: LabourState, rng: np.random.Generator) -> MatchResult:
    """Assign applications to vacancies and hire.

    Each application lands on one of its target's open vacancies uniformly at
    random; each vacancy with applicants offers the job to one of them
    uniformly; a worker holding several offers accepts one uniformly and the
    other vacancies stay open.
    """
    histogram = state.vacancy_ages.astype(np.int64)
    n_nodes, n_ages = histogram.shape
    flows = np.zeros((n_nodes, n_nodes), dtype=np.int64)
    filled = np.zeros_like(histogram)
    if len(apps) == 0:
        return MatchResult(FlowMatrix(flows), filled)

    vacancies = histogram.sum(axis=1)
    slot_offset = np.concatenate(([0], np.cumsum(vacancies)))[:-1]
    slot_node = np.repeat(np.repeat(np.arange(n_nodes), n_ages), histogram.ravel())
    slot_age = np.repeat(np.tile(np.arange(n_ages), n_nodes), histogram.ravel())

    slot = slot_offset[apps.target] + rng.integers(0, vacancies[apps.target])

    # first application per slot after a shuffle = a uniformly chosen applicant
    order = rng.permutation(len(apps))
    _, first = np.unique(slot[order], return_index=True)
    offer_app = order[first]
    offer_worker = apps.worker[offer_app]
    offer_slot = slot[offer_app]

    order = rng.permutation(len(offer_app))
    _, first = np.unique(offer_worker[order], return_index=True)
    accepted = order[first]
    hired_worker = offer_worker[accepted]
    hired_slot = offer_slot[accepted]

    np.add.at(flows, (apps.worker_origin[hired_worker], slot_node[hired_slot]), 1)
    np.add.at(filled, (slot_node[hired_slot], slot_age[hired_slot]), 1)
    return MatchResult(FlowMatrix(flows), filled)


def fill_probability(applications: np.ndarray, vacancies: np.ndarray) -> np.ndarray:
    """Probability a vacancy receives at least one of ``applications`` spread uniformly.

    1 - (1 - 1/v)^s for v > 1; a single (or fractional) vacancy fills with min(1, s).
    """
    s = np.asarray(applications, dtype=np.float64)
    v = np.asarray(vacancies, dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        many = 1.0 - np.power(np.where(v > 1, 1.0 - 1.0 / v, 0.0), s)
    return np.where(v > 1, many, np.minimum(1.0, s))


def expected_flows(pool: np.ndarray, vacancies: np.ndarray, network: MobilityNetwork,
                   params: SimulationParams) -> Tuple[np.ndarray, np.ndarray]:
    """Expected hires F[i, j] and the filled fraction of each node's vacancies."""
    pool = np.asarray(pool, dtype=np.float64)
    vacancies = np.asarray(vacancies, dtype=np.float64)
    per_worker = params.applications_per_worker
    Q = search_weights(network, vacancies)

    sent = per_worker * pool[:, None] * Q
    received = sent.sum(axis=0)
    offers = vacancies * fill_probability(received, vacancies)
    with np.errstate(divide='ignore', invalid='ignore'):
        offer_rate = np.where(received > 0, offers / received, 0.0)

    if per_worker == 1:
        flows = sent * offer_rate[None, :]
    else:
        # chance of at least one offer, split across targets by offer intensity
        miss = np.prod(np.power(1.0 - offer_rate[None, :], per_worker * Q), axis=1)
        intensity = Q * offer_rate[None, :]
        totals = intensity.sum(axis=1, keepdims=True)
        with np.errstate(divide='ignore', invalid='ignore'):
            split = np.where(totals > 0, intensity / totals, 0.0)
        flows = pool[:, None] * (1.0 - miss)[:, None] * split

    hires = flows.sum(axis=0)
    with np.errstate(divide='ignore', invalid='ignore'):
        filled_fraction = np.where(vacancies > 0, np.minimum(1.0, hires / vacancies), 0.0)
    return flows, filled_fraction
