"""Whole-pipeline properties on synthetic instances."""

import filecmp
import os

import numpy as np
import pandas as pd
import pytest

from conftest import write_config
from labourflow.config.settings import Config, RunConfig
from labourflow.metrics import within_bin_dispersion
from labourflow.operations.analyze import AnalyzeOperation
from labourflow.operations.build_network import BuildNetworkOperation
from labourflow.operations.prepare_scenario import PrepareScenarioOperation
from labourflow.operations.simulate import TIMING_FILE, SimulateOperation
from labourflow.operations.synthetic import SyntheticOperation


SHOCKED_ECONOMY = {
    'n_occupations': 40,
    'n_regions': 5,
    'sector_size': 20000.0,
    'base_weight': 0.2,
    'within_region': 8.0,
    'self_weight': 4.0,
    'shocks': {'shock': {'S1': 0.05, 'S2': -0.05, 'S3': 0.02, 'S4': -0.02}},
    'seed': 11,
}
MEAN_FIELD = {'params': {'mode': 'meanfield'}}


def workspace(directory, synthetic, simulation=None, analysis=None):
    path = write_config(directory, synthetic=synthetic, simulation=simulation, analysis=analysis)
    SyntheticOperation(Config(path), os.path.join(str(directory), "inputs")).generate()
    return path


def run_pipeline(config_path, output, no_friction=False):
    config = Config(config_path)
    BuildNetworkOperation(config, output).build(no_friction=True if no_friction else None)
    PrepareScenarioOperation(config, output).prepare()
    run_config = RunConfig.from_config(config, output, progress=False)
    SimulateOperation(output).simulate(run_config)
    return AnalyzeOperation(output).analyze(run_config)['summary']


@pytest.fixture(scope="module")
def shocked(tmp_path_factory):
    """The 200-node economy under the shock, with and without search frictions."""
    directory = tmp_path_factory.mktemp("shocked")
    config = workspace(directory, SHOCKED_ECONOMY, MEAN_FIELD)
    results = {}
    for name, no_friction in (("frictional", False), ("complete", True)):
        output = str(directory / name)
        summary = run_pipeline(config, output, no_friction)
        outcomes = pd.read_csv(os.path.join(output, "analysis", "shock", "outcomes.csv"),
                               dtype={"occupation": str})
        results[name] = (summary["Scenarios"]["shock"], outcomes)
    return results


def test_baseline_totals_are_year_invariant(tmp_path):
    config = workspace(tmp_path, {'n_occupations': 10, 'n_regions': 3, 'baseline_growth': 0.03})
    output = str(tmp_path / "out")
    BuildNetworkOperation(Config(config), output).build()
    summary = PrepareScenarioOperation(Config(config), output).prepare()['summary']
    assert summary["Years"] == [2018, 2030]
    assert summary["BaselineTotalMaxRelativeDeviation"] <= 1e-9

    demand = pd.read_csv(os.path.join(output, "scenario", "demand.csv"))
    totals = demand[demand["scenario"] == "baseline"].groupby("year")["demand"].sum()
    assert len(totals) == 13
    assert np.max(np.abs(totals / totals.iloc[0] - 1.0)) <= 1e-9


def test_demand_decline_raises_unemployment(shocked):
    summary, outcomes = shocked["frictional"]
    assert len(outcomes) == 200
    assert summary["DemandResponseCorrelation"]["u_delta_pp"] <= -0.5


def test_frictions_spread_outcomes_for_equal_demand_change(shocked):
    _, frictional = shocked["frictional"]
    _, complete = shocked["complete"]
    pd.testing.assert_series_equal(frictional["demand_change_pct"], complete["demand_change_pct"])
    spread, edges = within_bin_dispersion(frictional["demand_change_pct"].to_numpy(),
                                          frictional["u_delta_pp"].to_numpy(), n_bins=10)
    complete_spread, _ = within_bin_dispersion(complete["demand_change_pct"].to_numpy(),
                                               complete["u_delta_pp"].to_numpy(), edges=edges)
    assert complete_spread <= 0.5 * spread


def test_vacancy_rankings_are_robust_to_duration_threshold(shocked):
    summary, _ = shocked["frictional"]
    correlations = summary["VacancyThresholdRankCorrelation"]
    assert sorted(correlations) == ["3-12", "3-6", "6-12"]
    assert all(value is not None and value >= 0.8 for value in correlations.values())


def test_unshocked_scenario_has_zero_deltas(tmp_path):
    synthetic = {'n_occupations': 6, 'n_regions': 3, 'end_year': 2022, 'shocks': {'flat': {}}, 'seed': 2}
    config = workspace(tmp_path, synthetic, {"seeds": 3}, {"start_year": 2018, "end_year": 2022})
    summary = run_pipeline(config, str(tmp_path / "out"))
    assert summary["Seeds"] == [0, 1, 2]
    outcomes = pd.read_csv(os.path.join(str(tmp_path / "out"), "analysis", "flat", "outcomes.csv"))
    assert (outcomes["u_delta_pp"] == 0).all()
    assert (outcomes["v_delta_pp"] == 0).all()
    assert (outcomes["demand_change_pct"] == 0).all()


def test_pipeline_is_deterministic(tmp_path):
    synthetic = {'n_occupations': 6, 'n_regions': 3, 'end_year': 2021, 'seed': 5}
    roots = []
    for name in ("first", "second"):
        root = tmp_path / name
        root.mkdir()
        config = workspace(root, synthetic, {"seeds": 2}, {"start_year": 2018, "end_year": 2021})
        run_pipeline(config, str(root / "out"))
        roots.append(str(root))

    files = sorted(
        os.path.relpath(os.path.join(directory, name), roots[0])
        for directory, _, names in os.walk(roots[0]) for name in names
    )
    compared = [rel for rel in files if rel != os.path.join("out", TIMING_FILE)]
    assert os.path.join("out", "runs", "shock", "seed_1.csv") in compared
    assert os.path.join("out", "analysis", "summary.json") in compared
    _, mismatch, errors = filecmp.cmpfiles(roots[0], roots[1], compared, shallow=False)
    assert mismatch == [] and errors == []
