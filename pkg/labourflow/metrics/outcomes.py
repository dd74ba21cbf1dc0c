"""Seed-paired scenario outcomes against the baseline and the tables derived from them."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from ..errors import InputError
from ..models.network import OccRegion
from ..models.scenario import DemandScenario
from ..models.state import Trajectory
from .rates import avg_unemployment_rate, avg_vacancy_rate


logger = logging.getLogger(__name__)


@dataclass
class RunRates:
    """Window-averaged rates of one run."""
    seed: int
    u_rate: np.ndarray
    v_rate: np.ndarray
    employment: np.ndarray


def run_rates(trajectory: Trajectory, start_year: int, end_year: int, x_months: int = 6) -> RunRates:
    steps = trajectory.window(start_year, end_year)
    return RunRates(
        seed=trajectory.seed,
        u_rate=avg_unemployment_rate(trajectory, steps),
        v_rate=avg_vacancy_rate(trajectory, steps, x_months),
        employment=trajectory.employed[steps[0]].astype(np.float64),
    )


def paired_deltas(baseline: Mapping[int, np.ndarray], scenario: Mapping[int, np.ndarray]) -> np.ndarray:
    """Mean over seeds of (scenario - baseline), paired seed by seed."""
    if set(baseline) != set(scenario):
        raise InputError(
            f"Baseline seeds {sorted(baseline)} and scenario seeds {sorted(scenario)} differ"
        )
    if not baseline:
        raise InputError("No runs to pair")
    return np.mean([scenario[seed] - baseline[seed] for seed in sorted(baseline)], axis=0)


def demand_change_pct(baseline: DemandScenario, scenario: DemandScenario, year: int) -> np.ndarray:
    """Percent difference of the scenario's demand from the baseline's in ``year``."""
    base = baseline.year_demand(year)
    shocked = scenario.year_demand(year)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(base > 0, 100.0 * (shocked - base) / base, np.nan)


@dataclass
class OutcomeTable:
    """Per-node outcomes of one scenario relative to the baseline.

    Rates are ensemble means over seeds; deltas are percentage points.
    """
    scenario_id: str
    nodes: List[OccRegion]
    seeds: List[int]
    start_year: int
    end_year: int
    u_rate: np.ndarray
    u_delta_pp: np.ndarray
    v_rate: np.ndarray
    v_delta_pp: np.ndarray
    demand_change_pct: np.ndarray
    employment: np.ndarray
    mean_wage: Optional[np.ndarray] = None
    x_months: int = 6

    @property
    def groups(self) -> List[str]:
        return [node.broad_group for node in self.nodes]

    @property
    def regions(self) -> List[str]:
        return [node.region_id for node in self.nodes]

    @property
    def employment_column(self) -> str:
        return f"employment_{self.start_year}"

    def frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({
            "occupation": [node.occupation_id for node in self.nodes],
            "region": self.regions,
            "group": self.groups,
            "u_rate": self.u_rate,
            "u_delta_pp": self.u_delta_pp,
            "v_rate": self.v_rate,
            "v_delta_pp": self.v_delta_pp,
            "demand_change_pct": self.demand_change_pct,
            self.employment_column: self.employment,
        })
        if self.mean_wage is not None:
            frame["mean_wage"] = self.mean_wage
        return frame


def outcome_table(baseline_runs: Sequence[Trajectory], scenario_runs: Sequence[Trajectory],
                  baseline: DemandScenario, scenario: DemandScenario,
                  start_year: int, end_year: int, x_months: int = 6,
                  metadata: Optional[Mapping[str, dict]] = None) -> OutcomeTable:
    """Outcome table of ``scenario`` from seed-matched runs of it and the baseline."""
    if not baseline_runs or not scenario_runs:
        raise InputError(f"Scenario {scenario.scenario_id!r} has no runs to compare")
    nodes = list(baseline_runs[0].nodes)
    for run in list(baseline_runs) + list(scenario_runs):
        if run.nodes != nodes:
            raise InputError(f"Run {run.scenario_id}/seed {run.seed} has a different node order")

    base = {run.seed: run_rates(run, start_year, end_year, x_months) for run in baseline_runs}
    shocked = {run.seed: run_rates(run, start_year, end_year, x_months) for run in scenario_runs}
    seeds = sorted(shocked)
    logger.debug(f"Pairing {len(seeds)} seeds of {scenario.scenario_id} with the baseline")

    wages = None
    if metadata:
        values = [metadata.get(node.key, {}).get("mean_wage") for node in nodes]
        if any(value is not None for value in values):
            wages = np.array([np.nan if value is None else value for value in values], dtype=np.float64)

    return OutcomeTable(
        scenario_id=scenario.scenario_id,
        nodes=nodes,
        seeds=seeds,
        start_year=start_year,
        end_year=end_year,
        u_rate=np.mean([shocked[seed].u_rate for seed in seeds], axis=0),
        u_delta_pp=100.0 * paired_deltas({s: r.u_rate for s, r in base.items()},
                                         {s: r.u_rate for s, r in shocked.items()}),
        v_rate=np.mean([shocked[seed].v_rate for seed in seeds], axis=0),
        v_delta_pp=100.0 * paired_deltas({s: r.v_rate for s, r in base.items()},
                                         {s: r.v_rate for s, r in shocked.items()}),
        demand_change_pct=demand_change_pct(baseline, scenario, end_year),
        employment=np.mean([base[seed].employment for seed in sorted(base)], axis=0),
        mean_wage=wages,
        x_months=x_months,
    )


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    defined = np.isfinite(values) & (weights > 0)
    if not defined.any():
        return float("nan")
    return float(np.average(values[defined], weights=weights[defined]))


def _grouped_table(table: OutcomeTable, labels: Sequence[str], name: str) -> pd.DataFrame:
    labels = np.asarray(labels, dtype=object)
    rows = []
    for label in sorted(set(labels)):
        members = labels == label
        weights = table.employment[members]
        rows.append({
            name: label,
            "nodes": int(members.sum()),
            "employment": float(weights.sum()),
            "u_rate": _weighted_mean(table.u_rate[members], weights),
            "u_delta_pp": _weighted_mean(table.u_delta_pp[members], weights),
            "v_rate": _weighted_mean(table.v_rate[members], weights),
            "v_delta_pp": _weighted_mean(table.v_delta_pp[members], weights),
            "demand_change_pct": _weighted_mean(table.demand_change_pct[members], weights),
        })
    return pd.DataFrame(rows)


def region_table(table: OutcomeTable) -> pd.DataFrame:
    """Employment-weighted outcomes per region."""
    return _grouped_table(table, table.regions, "region")


def group_table(table: OutcomeTable) -> pd.DataFrame:
    """Employment-weighted outcomes per broad occupation group."""
    return _grouped_table(table, table.groups, "group")


def heatmap_table(table: OutcomeTable) -> pd.DataFrame:
    """Mean deltas per (group, region) cell, long format; every combination is listed."""
    frame = table.frame()
    rows = []
    for group in sorted(set(table.groups)):
        for region in sorted(set(table.regions)):
            cell = frame[(frame["group"] == group) & (frame["region"] == region)]
            rows.append({
                "group": group,
                "region": region,
                "nodes": len(cell),
                "u_delta_pp": float(cell["u_delta_pp"].mean()) if len(cell) else float("nan"),
                "v_delta_pp": float(cell["v_delta_pp"].mean()) if len(cell) else float("nan"),
            })
    return pd.DataFrame(rows, columns=["group", "region", "nodes", "u_delta_pp", "v_delta_pp"])


def top_affected(table: OutcomeTable, n: int = 5) -> pd.DataFrame:
    """The ``n`` nodes with the largest unemployment-rate increase; ties by node key."""
    frame = table.frame()
    frame = frame[np.isfinite(frame["u_delta_pp"])].copy()
    frame["key"] = frame["occupation"] + ":" + frame["region"]
    frame = frame.sort_values(["u_delta_pp", "key"], ascending=[False, True], kind="stable").head(n)
    frame.insert(0, "rank", np.arange(1, len(frame) + 1))
    return frame.drop(columns=["key"]).reset_index(drop=True)


def spearman(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    """Spearman correlation over pairs defined in both; None when it is undefined."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    defined = np.isfinite(x) & np.isfinite(y)
    if defined.sum() < 3 or np.ptp(x[defined]) == 0 or np.ptp(y[defined]) == 0:
        return None
    rho, _ = spearmanr(x[defined], y[defined])
    return float(rho)


def demand_response_correlation(table: OutcomeTable) -> Dict[str, Optional[float]]:
    """Rank correlation of the demand change with the unemployment and vacancy deltas."""
    return {
        "u_delta_pp": spearman(table.demand_change_pct, table.u_delta_pp),
        "v_delta_pp": spearman(table.demand_change_pct, table.v_delta_pp),
    }


def within_bin_dispersion(demand_change: np.ndarray, deltas: np.ndarray, n_bins: int = 10,
                          edges: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """Mean standard deviation of ``deltas`` within bins of ``demand_change``.

    Returns the mean over bins holding at least two nodes and the bin edges
    used, so a second table can be binned identically.
    """
    demand_change = np.asarray(demand_change, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    defined = np.isfinite(demand_change) & np.isfinite(deltas)
    if not defined.any():
        raise InputError("No defined outcomes to bin")
    if edges is None:
        edges = np.quantile(demand_change[defined], np.linspace(0.0, 1.0, n_bins + 1))
    bins = np.clip(np.searchsorted(edges, demand_change[defined], side="right") - 1, 0, len(edges) - 2)
    spreads = [deltas[defined][bins == k].std() for k in range(len(edges) - 1) if (bins == k).sum() >= 2]
    if not spreads:
        return float("nan"), edges
    return float(np.mean(spreads)), edges
