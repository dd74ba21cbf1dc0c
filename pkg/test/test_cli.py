"""End-to-end tests of the command-line interface: JSON output and exit codes."""

import json
import os
import sys

import pandas as pd
import pytest
import yaml

from conftest import write_config
from labourflow.errors import SimulationFault
from labourflow.main import main
from labourflow.storage.artifact_store import LOCK_NAME, ArtifactStore
import labourflow.workers.run_worker as run_worker


SYNTHETIC = {'n_occupations': 6, 'n_regions': 3, 'start_year': 2018, 'end_year': 2022, 'seed': 3}
ANALYSIS = {'start_year': 2018, 'end_year': 2022}


def cli(monkeypatch, capsys, *argv):
    """Run the CLI; returns (exit code, parsed stdout or raw text)."""
    monkeypatch.setattr(sys, "argv", ["labourflow", "--no-progress", "--log-level", "WARNING", *argv])
    code = 0
    try:
        main()
    except SystemExit as e:
        code = e.code
    out = capsys.readouterr().out
    try:
        return code, json.loads(out)
    except json.JSONDecodeError:
        return code, out


@pytest.fixture
def workspace(tmp_path, monkeypatch, capsys):
    """Synthetic inputs, network and prepared scenarios in ``tmp_path``."""
    config = write_config(tmp_path, synthetic=SYNTHETIC, analysis=ANALYSIS)
    output = str(tmp_path / "out")
    for argv in (["gen-synthetic", "--output", str(tmp_path / "inputs")],
                 ["build-network", "--output", output],
                 ["prepare-scenario", "--output", output]):
        code, result = cli(monkeypatch, capsys, "--config", config, *argv)
        assert code == 0, result
        assert result["Status"] == "Complete"
    return config, output


class TestCommands:

    def test_no_command_prints_help(self, monkeypatch, capsys):
        code, out = cli(monkeypatch, capsys)
        assert code == 1
        assert "build-network" in out

    def test_usage_error(self, monkeypatch, capsys):
        code, _ = cli(monkeypatch, capsys, "simulate")
        assert code == 2

    def test_gen_synthetic(self, tmp_path, monkeypatch, capsys):
        config = write_config(tmp_path, synthetic=SYNTHETIC)
        code, result = cli(monkeypatch, capsys, "--config", config, "gen-synthetic",
                           "--output", str(tmp_path / "inputs"), "--seed", "9")
        assert code == 0
        assert result["Nodes"] == 18
        assert result["Seed"] == 9
        assert result["Outputs"]["transitions"] == "transitions.csv"
        manifest = json.loads((tmp_path / "inputs" / "manifest.json").read_text())
        assert manifest["Kind"] == "synthetic"
        assert manifest["Parameters"]["seed"] == 9

    def test_missing_inputs_exit_2(self, tmp_path, monkeypatch, capsys):
        config = write_config(tmp_path)
        code, result = cli(monkeypatch, capsys, "--config", config, "build-network", "--output", str(tmp_path / "out"))
        assert code == 2
        assert result["Status"] == "Failed"
        assert result["ErrorType"] == "InputError"

    def test_build_and_prepare_outputs(self, workspace, monkeypatch, capsys):
        config, output = workspace
        for name in ("network/edges.csv", "network/nodes.json", "network/merge_map.csv", "network/report.json",
                     "scenario/demand.csv", "scenario/targets.csv", "scenario/summary.json"):
            assert os.path.exists(os.path.join(output, name)), name
        summary = json.loads(open(os.path.join(output, "scenario", "summary.json")).read())
        assert summary["Scenarios"] == ["baseline", "shock"]
        assert summary["Timesteps"] == 4 * 12 + 1
        assert summary["BaselineTotalMaxRelativeDeviation"] <= 1e-9

    def test_no_friction_network(self, workspace, monkeypatch, capsys):
        config, output = workspace
        code, result = cli(monkeypatch, capsys, "--config", config, "build-network",
                           "--output", output, "--no-friction")
        assert code == 0
        assert result["Edges"] == result["Nodes"] ** 2
        assert result["Assortativity"]["Region"] == pytest.approx(0.0, abs=1e-12)

    def test_simulate_before_prepare(self, tmp_path, monkeypatch, capsys):
        config = write_config(tmp_path)
        code, result = cli(monkeypatch, capsys, "--config", config, "simulate", "--output", str(tmp_path / "out"))
        assert code == 2
        assert "prepare scenarios" in result["Error"]


class TestSimulateAndAnalyze:

    def test_ensemble(self, workspace, monkeypatch, capsys):
        config, output = workspace
        code, result = cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output,
                           "--seeds", "2", "--workers", "2")
        assert code == 0
        assert result["Summary"] == {"TotalRuns": 4, "CompletedRuns": 4, "FaultedRuns": 0}
        assert not os.path.exists(os.path.join(output, LOCK_NAME))
        trajectory = pd.read_csv(os.path.join(output, "runs", "shock", "seed_1.csv"))
        assert {"vacancies_age_ge_3m", "vacancies_age_ge_6m", "vacancies_age_ge_12m"} <= set(trajectory.columns)

        code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output, "--seeds", "2")
        assert code == 0
        assert result["Seeds"] == [0, 1]
        assert result["Window"] == [2018, 2022]
        assert len(result["Scenarios"]["shock"]["TopAffected"]) == 5
        for name in ("outcomes.csv", "heatmap.csv", "regions.csv", "groups.csv", "top_affected.csv",
                     "decomposition.json"):
            assert os.path.exists(os.path.join(output, "analysis", "shock", name)), name
        outcomes = pd.read_csv(os.path.join(output, "analysis", "shock", "outcomes.csv"))
        assert len(outcomes) == 18
        assert "mean_wage" in outcomes.columns

    def test_analysis_parameters_must_match(self, workspace, monkeypatch, capsys):
        config, output = workspace
        assert cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output)[0] == 0
        code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output, "--seeds", "3")
        assert code == 2
        assert "seeds" in result["Error"]
        code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output,
                           "--mode", "meanfield")
        assert code == 2

    def test_untracked_vacancy_age_asks_for_resimulation(self, workspace, monkeypatch, capsys):
        config, output = workspace
        assert cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output)[0] == 0
        code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output,
                           "--x-months", "9")
        assert code == 2
        assert "[3, 6, 12]" in result["Error"]
        assert "re-simulate with --x-months 9" in result["Error"]

        assert cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output,
                   "--x-months", "9")[0] == 0
        for x_months in ("9", "12"):
            code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output,
                               "--x-months", x_months)
            assert code == 0, result

    def test_changed_inputs_are_detected(self, workspace, monkeypatch, capsys):
        config, output = workspace
        assert cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output)[0] == 0
        with open(os.path.join(output, "scenario", "targets.csv"), "a") as f:
            f.write("\n")
        code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output)
        assert code == 3
        assert result["ErrorType"] == "ConstraintError"

    def test_faulted_run_exit_4(self, workspace, monkeypatch, capsys):
        config, output = workspace
        original = run_worker.simulate

        def faulty(scenario, network, params):
            if scenario.scenario_id == "shock" and params.seed == 1:
                raise SimulationFault("Negative employment (-1) at node 0, step 3")
            return original(scenario, network, params)

        monkeypatch.setattr(run_worker, "simulate", faulty)
        code, result = cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output, "--seeds", "2")
        assert code == 4
        assert result["Status"] == "Partial"
        assert result["Summary"]["FaultedRuns"] == 1
        assert result["Errors"][0]["seed"] == 1
        manifest = json.loads(open(os.path.join(output, "runs", "manifest.json")).read())
        assert [run["Status"] for run in manifest["Runs"]].count("Faulted") == 1

        code, result = cli(monkeypatch, capsys, "--config", config, "analyze", "--output", output, "--seeds", "2")
        assert code == 0
        assert result["Seeds"] == [0]

    def test_lock_blocks_simulate_until_unlocked(self, workspace, monkeypatch, capsys):
        config, output = workspace
        ArtifactStore(output).create_lock()
        code, result = cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output)
        assert code == 3
        assert "unlock" in result["Error"]

        code, result = cli(monkeypatch, capsys, "unlock", "--output", output)
        assert code == 0
        assert result["LockExisted"] is True
        code, result = cli(monkeypatch, capsys, "unlock", "--output", output)
        assert result["LockExisted"] is False
        assert cli(monkeypatch, capsys, "--config", config, "simulate", "--output", output)[0] == 0


class TestCalibrate:

    def test_calibrated_rates_hit_the_target(self, workspace, monkeypatch, capsys):
        config, output = workspace
        code, result = cli(monkeypatch, capsys, "--config", config, "calibrate", "--output", output,
                           "--target", "0.06")
        assert code == 0
        assert result["AchievedUnemployment"] == pytest.approx(0.06, abs=1e-6)
        params = result["Params"]
        assert params["delta_u"] == params["delta_v"]
        assert 1e-4 < params["delta_u"] < 0.2
        snippet = yaml.safe_load(open(os.path.join(output, "calibration", "params.yaml")))
        assert snippet["simulation"]["params"] == params

    def test_unreachable_target_exit_3(self, workspace, monkeypatch, capsys):
        config, output = workspace
        code, result = cli(monkeypatch, capsys, "--config", config, "calibrate", "--output", output,
                           "--target", "0.01")
        assert code == 3
        assert "not bracketed" in result["Error"]

    def test_target_out_of_range_exit_2(self, workspace, monkeypatch, capsys):
        config, output = workspace
        code, _ = cli(monkeypatch, capsys, "--config", config, "calibrate", "--output", output, "--target", "1.5")
        assert code == 2
