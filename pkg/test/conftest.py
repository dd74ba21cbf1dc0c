"""Shared fixtures for the labourflow test suite."""

import os
import sys

import numpy as np
import pytest
import yaml

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from labourflow.config.settings import Config  # noqa: E402
from labourflow.models.network import MobilityNetwork, OccRegion  # noqa: E402
from labourflow.models.scenario import DemandScenario  # noqa: E402
from labourflow.models.state import LabourState  # noqa: E402
from labourflow.scenario.interpolation import interpolate_demand  # noqa: E402
from labourflow.storage.artifact_store import ArtifactStore  # noqa: E402
from labourflow.synthetic.generator import SyntheticSpec, write_synthetic  # noqa: E402


INPUT_NAMES = ("transitions", "hierarchy", "regions", "wages", "sector_demand", "mix")


def make_nodes(n, region="R1"):
    return [OccRegion(f"{k + 1}1", region) for k in range(n)]


def make_network(matrix, nodes=None):
    matrix = np.asarray(matrix, dtype=np.float64)
    return MobilityNetwork(nodes=nodes or make_nodes(matrix.shape[0]), matrix=matrix)


def make_state(employed, unemployed, vacancies, n_ages=13, dtype=np.int64):
    employed = np.asarray(employed, dtype=dtype)
    ages = np.zeros((len(employed), n_ages), dtype=dtype)
    ages[:, 0] = np.asarray(vacancies, dtype=dtype)
    return LabourState(employed=employed, unemployed=np.asarray(unemployed, dtype=dtype), vacancy_ages=ages)


def make_scenario(D_star, nodes, years, steps_per_year=12, scenario_id="baseline"):
    D_star = np.asarray(D_star, dtype=np.float64)
    return DemandScenario(
        scenario_id=scenario_id,
        nodes=list(nodes),
        years=list(years),
        D_star=D_star,
        steps_per_year=steps_per_year,
        d_target=interpolate_demand(D_star, list(years), steps_per_year),
    )


def write_config(directory, synthetic=None, simulation=None, analysis=None, network=None):
    """Config file whose inputs point at ``<directory>/inputs``."""
    data = {
        'inputs': {name: os.path.join("inputs", f"{name}.csv") for name in INPUT_NAMES},
        'scenario': {'broadcast_mix': True},
        'synthetic': synthetic or {},
        'simulation': simulation or {},
        'analysis': analysis or {},
        'network': network or {},
    }
    path = os.path.join(str(directory), "config.yaml")
    with open(path, 'w') as f:
        yaml.safe_dump(data, f)
    return path


def synthetic_workspace(directory, **spec_values):
    """Synthetic inputs plus a config pointing at them; returns the Config."""
    path = write_config(directory, synthetic=spec_values)
    config = Config(path)
    write_synthetic(config.synthetic_spec, ArtifactStore(os.path.join(str(directory), "inputs")))
    return config


@pytest.fixture
def small_spec():
    return SyntheticSpec(n_occupations=6, n_regions=3, seed=7)


@pytest.fixture
def line_network():
    # 0 -> 1, 1 -> 2, 2 -> 1
    return make_network([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
