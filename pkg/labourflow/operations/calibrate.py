"""Calibration of the separation/opening rate against a target unemployment rate."""

import logging
import os
from dataclasses import replace
from typing import Any, Dict, Optional

import numpy as np
import yaml
from scipy.optimize import brentq

from ..abm.engine import initial_state, run
from ..config.settings import Config
from ..errors import ConstraintError, InputError
from ..models.manifest import ArtifactManifest
from ..models.network import MobilityNetwork
from ..models.scenario import BASELINE, DemandScenario
from ..models.state import MEAN_FIELD, SimulationParams
from ..storage.artifact_store import ArtifactStore
from .simulate import SIMULATION_INPUTS, SimulateOperation


logger = logging.getLogger(__name__)

CALIBRATION_PREFIX = "calibration"
PARAMS_FILE = os.path.join(CALIBRATION_PREFIX, "params.yaml")
MANIFEST_FILE = os.path.join(CALIBRATION_PREFIX, "manifest.json")


def steady_scenario(baseline: DemandScenario, horizon_years: int) -> DemandScenario:
    """Baseline first-year demand held constant for ``horizon_years``."""
    spy = baseline.steps_per_year
    first = baseline.D_star[0]
    years = [baseline.years[0] + k for k in range(horizon_years + 1)]
    return DemandScenario(
        scenario_id=BASELINE,
        nodes=baseline.nodes,
        years=years,
        D_star=np.tile(first, (len(years), 1)),
        steps_per_year=spy,
        d_target=np.tile(first, (horizon_years * spy + 1, 1)),
    )


def steady_unemployment_rate(delta: float, scenario: DemandScenario, network: MobilityNetwork,
                             params: SimulationParams) -> float:
    """Aggregate mean-field unemployment rate at the end of the horizon with delta_u = delta_v = delta."""
    params = replace(params, delta_u=delta, delta_v=delta, mode=MEAN_FIELD)
    trajectory = run(initial_state(scenario, params), scenario, network, params)
    unemployed = float(trajectory.unemployed[-1].sum())
    workers = unemployed + float(trajectory.employed[-1].sum())
    if workers <= 0:
        raise ConstraintError("Baseline has no workers to calibrate against")
    return unemployed / workers


class CalibrateOperation:
    """Handles fitting of delta_u = delta_v to a steady-state unemployment target."""

    def __init__(self, config: Config, output_dir: str):
        self.config = config
        self.store = ArtifactStore(output_dir)
        self.simulation = SimulateOperation(output_dir)

    def calibrate(self, target: Optional[float] = None) -> Dict[str, Any]:
        """Brent's method on delta within the configured bracket; gamma stays as configured."""
        self.config.override('calibration', target_unemployment=target)
        settings = self.config.section('calibration')
        target = float(settings['target_unemployment'])
        lower, upper = float(settings['lower']), float(settings['upper'])
        horizon = int(settings['horizon_years'])
        if not 0.0 < target < 1.0:
            raise InputError(f"calibration.target_unemployment must lie in (0, 1), got {target}")
        if not 0.0 <= lower < upper <= 1.0:
            raise InputError(f"calibration bracket [{lower}, {upper}] is not a sub-interval of [0, 1]")
        if horizon < 1:
            raise InputError("calibration.horizon_years must be >= 1")

        params = self.config.simulation_params
        network, _, scenarios = self.simulation.load_inputs(params.steps_per_year)
        scenario = steady_scenario(scenarios[BASELINE], horizon)
        logger.info(f"Calibrating delta to a {target:.2%} steady-state unemployment rate")

        def gap(delta: float) -> float:
            rate = steady_unemployment_rate(delta, scenario, network, params)
            logger.debug(f"delta={delta:.6g}: unemployment rate {rate:.6g}")
            return rate - target

        low_gap, high_gap = gap(lower), gap(upper)
        if low_gap * high_gap > 0:
            raise ConstraintError(
                f"Target {target} is not bracketed: rates {low_gap + target:.4g} at delta={lower}, "
                f"{high_gap + target:.4g} at delta={upper}"
            )
        delta, info = brentq(gap, lower, upper, xtol=float(settings['tolerance']), full_output=True)
        if not info.converged:
            raise ConstraintError(f"Calibration did not converge: {info.flag}")
        achieved = gap(delta) + target

        fitted = {
            'delta_u': float(delta),
            'delta_v': float(delta),
            'gamma_u': params.gamma_u,
            'gamma_v': params.gamma_v,
        }
        snippet = yaml.safe_dump({'simulation': {'params': fitted}}, default_flow_style=False, sort_keys=True)
        self.store.write_text(PARAMS_FILE, snippet)

        manifest = ArtifactManifest(
            kind="calibration",
            inputs=self.store.digests(SIMULATION_INPUTS),
            outputs=self.store.digests([PARAMS_FILE]),
            parameters={
                **{key: settings[key] for key in sorted(settings)},
                'steps_per_year': params.steps_per_year,
                'scale': params.scale,
                'iterations': info.iterations,
            },
        )
        self.store.write_json(MANIFEST_FILE, manifest.to_dict())
        logger.info(f"Calibrated delta={delta:.6g} in {info.iterations} iterations")
        return {
            'params': fitted,
            'target': target,
            'achieved': achieved,
            'iterations': info.iterations,
            'outputs': [PARAMS_FILE],
            'output_dir': self.store.root,
        }
