"""Main CLI entry point for labourflow."""

import argparse
import json
import logging
import sys
from typing import Any, Dict

from .config.settings import Config, RunConfig
from .errors import LabourflowError
from .models.network import NORMALIZATIONS
from .models.state import MODES
from .operations.analyze import AnalyzeOperation
from .operations.build_network import BuildNetworkOperation
from .operations.calibrate import CalibrateOperation
from .operations.prepare_scenario import PrepareScenarioOperation
from .operations.simulate import SimulateOperation
from .operations.synthetic import SyntheticOperation
from .operations.unlock import UnlockOperation
from .utils.logger import setup_logging


logger = logging.getLogger(__name__)


def print_json_output(data: Dict[str, Any]):
    """Print formatted JSON output."""
    print(json.dumps(data, indent=2))


def fail(operation: str, error: Exception):
    """Log, print the failure document and exit with the error's code."""
    logger.error(f"{operation} failed: {error}")
    print_json_output({
        "Operation": operation,
        "Status": "Failed",
        "ErrorType": type(error).__name__,
        "Error": str(error)
    })
    sys.exit(error.exit_code if isinstance(error, LabourflowError) else 1)


def run_config(args, config: Config) -> RunConfig:
    """Apply the simulation flags to the config and resolve a RunConfig."""
    config.override('simulation', seed=args.seed, steps_per_year=args.steps_per_year, scale=args.scale,
                    mode=args.mode, workers=args.workers, backend=args.backend, scenarios=args.scenario)
    if args.seeds is not None:
        config.override('simulation', seeds=args.seeds)
    config.override('analysis', x_months=args.x_months)
    return RunConfig.from_config(config, args.output, progress=not args.no_progress)


def handle_build_network(args):
    """Handle build-network command."""
    try:
        config = Config(args.config)
        result = BuildNetworkOperation(config, args.output).build(
            normalization=args.normalization,
            no_friction=True if args.no_friction else None,
            min_presence=args.min_presence
        )
        report = result['report']
        print_json_output({
            "Operation": "BuildNetwork",
            "Status": "Complete",
            "OutputDir": result['output_dir'],
            "Nodes": report['Stats']['nodes'],
            "Edges": report['Stats']['edges'],
            "Connected": report['Stats']['connected'],
            "Assortativity": report['Assortativity'],
            "Merged": {
                "Occupations": report['Merged']['Occupations'],
                "AfterMerge": report['Merged']['AfterMerge']
            },
            "Outputs": result['outputs']
        })
    except Exception as e:
        fail("BuildNetwork", e)


def handle_prepare_scenario(args):
    """Handle prepare-scenario command."""
    try:
        config = Config(args.config)
        result = PrepareScenarioOperation(config, args.output).prepare(
            steps_per_year=args.steps_per_year,
            mix_year=args.mix_year,
            broadcast_mix=True if args.broadcast_mix else None
        )
        summary = result['summary']
        print_json_output({
            "Operation": "PrepareScenario",
            "Status": "Complete",
            "OutputDir": result['output_dir'],
            "Scenarios": summary['Scenarios'],
            "Years": summary['Years'],
            "Timesteps": summary['Timesteps'],
            "BaselineTotalMaxRelativeDeviation": summary['BaselineTotalMaxRelativeDeviation'],
            "Outputs": result['outputs']
        })
    except Exception as e:
        fail("PrepareScenario", e)


def handle_simulate(args):
    """Handle simulate command."""
    try:
        config = Config(args.config)
        result = SimulateOperation(args.output).simulate(run_config(args, config))
        runs = result['results']
        output = {
            "Operation": "Simulate",
            "Status": "Complete" if runs['faulted_runs'] == 0 else "Partial",
            "OutputDir": result['output_dir'],
            "Scenarios": result['manifest'].scenarios,
            "Seeds": result['manifest'].seeds,
            "Summary": {
                "TotalRuns": runs['total_runs'],
                "CompletedRuns": runs['completed_runs'],
                "FaultedRuns": runs['faulted_runs']
            }
        }
        if runs['errors']:
            output["Errors"] = runs['errors'][:5]
        print_json_output(output)

        if runs['faulted_runs'] > 0:
            sys.exit(4)
    except Exception as e:
        fail("Simulate", e)


def handle_analyze(args):
    """Handle analyze command."""
    try:
        config = Config(args.config)
        config.override('analysis', start_year=args.start_year, end_year=args.end_year, top_n=args.top_n)
        result = AnalyzeOperation(args.output).analyze(run_config(args, config))
        summary = result['summary']
        print_json_output({
            "Operation": "Analyze",
            "Status": "Complete",
            "OutputDir": result['output_dir'],
            "Seeds": summary['Seeds'],
            "Window": summary['Window'],
            "XMonths": summary['XMonths'],
            "Scenarios": {
                scenario_id: {
                    "DemandResponseCorrelation": values['DemandResponseCorrelation'],
                    "Decomposition": values['Decomposition'],
                    "TopAffected": values['TopAffected']
                }
                for scenario_id, values in summary['Scenarios'].items()
            }
        })
    except Exception as e:
        fail("Analyze", e)


def handle_gen_synthetic(args):
    """Handle gen-synthetic command."""
    try:
        config = Config(args.config)
        result = SyntheticOperation(config, args.output).generate(seed=args.seed)
        print_json_output({
            "Operation": "GenSynthetic",
            "Status": "Complete",
            "OutputDir": result['output_dir'],
            "Nodes": result['nodes'],
            "Seed": result['spec'].seed,
            "Outputs": result['outputs']
        })
    except Exception as e:
        fail("GenSynthetic", e)


def handle_calibrate(args):
    """Handle calibrate command."""
    try:
        config = Config(args.config)
        config.override('simulation', steps_per_year=args.steps_per_year, scale=args.scale)
        result = CalibrateOperation(config, args.output).calibrate(target=args.target)
        print_json_output({
            "Operation": "Calibrate",
            "Status": "Complete",
            "OutputDir": result['output_dir'],
            "TargetUnemployment": result['target'],
            "AchievedUnemployment": result['achieved'],
            "Iterations": result['iterations'],
            "Params": result['params'],
            "Outputs": result['outputs']
        })
    except Exception as e:
        fail("Calibrate", e)


def handle_unlock(args):
    """Handle unlock command."""
    try:
        result = UnlockOperation(args.output).unlock()
        print_json_output({
            "Operation": "Unlock",
            "OutputDir": result['output_dir'],
            "LockExisted": result['lock_existed'],
            "Message": result['message']
        })
    except Exception as e:
        fail("Unlock", e)


def add_simulation_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--seed', type=int, help='First seed of the ensemble (default: simulation.seed)')
    parser.add_argument('--seeds', type=int, help='Number of consecutive seeds (default: simulation.seeds)')
    parser.add_argument('--steps-per-year', type=int, help='Timesteps per year (default: 12)')
    parser.add_argument('--scale', type=float, help='Workers represented by one agent (default: 1)')
    parser.add_argument('--mode', choices=MODES, help='Stochastic agents or deterministic mean-field')
    parser.add_argument('--x-months', type=int, help='Vacancy age threshold in months (default: 6)')
    parser.add_argument('--scenario', action='append',
                        help='Scenario to run besides the baseline; repeatable (default: all)')
    parser.add_argument('--workers', type=int, help='Number of runs simulated in parallel (default: 1)')
    parser.add_argument('--backend', choices=['thread', 'process'], help='Worker pool backend (default: thread)')


def main():
    """Main CLI entry point."""
    parser = argparse.ArgumentParser(
        prog='labourflow',
        description='Builds regional occupational mobility networks and simulates labour market '
                    'responses to sectoral demand scenarios.'
    )

    parser.add_argument(
        '--config',
        help='YAML/JSON config file (default: $LABOURFLOW_CONFIG)'
    )
    parser.add_argument(
        '--log-level',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        default='INFO',
        help='Set logging level (default: INFO)'
    )
    parser.add_argument(
        '--log-file',
        help='Log to file in addition to console'
    )
    parser.add_argument(
        '--no-progress',
        action='store_true',
        help='Disable the progress bar'
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # Build network command
    build_parser = subparsers.add_parser(
        'build-network',
        help='Build the mobility network',
        description='Ingests job transitions, merges sparse occupations and writes the '
                    'occupation-region mobility network with its assortativity report.'
    )
    build_parser.add_argument('--output', required=True, help='Output directory')
    build_parser.add_argument('--normalization', choices=NORMALIZATIONS,
                              help='Normalize edge weights by source or destination marginals (default: source)')
    build_parser.add_argument('--no-friction', action='store_true',
                              help='Emit the complete equal-weight network over the same nodes')
    build_parser.add_argument('--min-presence', type=int,
                              help='Regions an occupation must appear in before merging (default: 1)')
    build_parser.set_defaults(func=handle_build_network)

    # Prepare scenario command
    prepare_parser = subparsers.add_parser(
        'prepare-scenario',
        help='Prepare target demand',
        description='Maps sectoral demand onto network nodes, normalizes it against the baseline '
                    'and interpolates it onto timesteps.'
    )
    prepare_parser.add_argument('--output', required=True, help='Output directory holding the network')
    prepare_parser.add_argument('--steps-per-year', type=int, help='Timesteps per year (default: 12)')
    prepare_parser.add_argument('--mix-year', help="Mix year to use, or 'average' (default: average)")
    prepare_parser.add_argument('--broadcast-mix', action='store_true',
                                help='Apply national mix rows to every region')
    prepare_parser.set_defaults(func=handle_prepare_scenario)

    # Simulate command
    simulate_parser = subparsers.add_parser(
        'simulate',
        help='Simulate the seed ensemble',
        description='Runs the baseline and the selected scenarios with common seeds and writes '
                    'one trajectory per run plus the run manifest.'
    )
    simulate_parser.add_argument('--output', required=True, help='Output directory holding prepared scenarios')
    add_simulation_arguments(simulate_parser)
    simulate_parser.set_defaults(func=handle_simulate)

    # Analyze command
    analyze_parser = subparsers.add_parser(
        'analyze',
        help='Analyze a simulated ensemble',
        description='Computes seed-paired outcome deltas, aggregate series, variance '
                    'decompositions and plot-ready tables.'
    )
    analyze_parser.add_argument('--output', required=True, help='Output directory holding simulated runs')
    add_simulation_arguments(analyze_parser)
    analyze_parser.add_argument('--start-year', type=int, help='First year of the metric window (default: 2018)')
    analyze_parser.add_argument('--end-year', type=int, help='Last year of the metric window (default: 2030)')
    analyze_parser.add_argument('--top-n', type=int, help='Rows of the most affected table (default: 5)')
    analyze_parser.set_defaults(func=handle_analyze)

    # Synthetic command
    synthetic_parser = subparsers.add_parser(
        'gen-synthetic',
        help='Generate synthetic inputs',
        description='Writes synthetic transition, hierarchy, region, wage, sector demand and mix CSVs.'
    )
    synthetic_parser.add_argument('--output', required=True, help='Output directory for the CSVs')
    synthetic_parser.add_argument('--seed', type=int, help='Generator seed (default: synthetic.seed)')
    synthetic_parser.set_defaults(func=handle_gen_synthetic)

    # Calibrate command
    calibrate_parser = subparsers.add_parser(
        'calibrate',
        help='Calibrate separation and opening rates',
        description='Fits delta_u = delta_v so that the mean-field baseline steady state matches '
                    'a target unemployment rate.'
    )
    calibrate_parser.add_argument('--output', required=True, help='Output directory holding prepared scenarios')
    calibrate_parser.add_argument('--target', type=float, help='Target unemployment rate (default: 0.05)')
    calibrate_parser.add_argument('--steps-per-year', type=int, help='Timesteps per year (default: 12)')
    calibrate_parser.add_argument('--scale', type=float, help='Workers represented by one agent (default: 1)')
    calibrate_parser.set_defaults(func=handle_calibrate)

    # Unlock command
    unlock_parser = subparsers.add_parser(
        'unlock',
        help='Remove a simulation lock',
        description='Removes the lockfile of an output directory. Use with caution as removing a lock '
                    'while a simulation is running lets two ensembles write the same runs.'
    )
    unlock_parser.add_argument('--output', required=True, help='Output directory to unlock')
    unlock_parser.set_defaults(func=handle_unlock)

    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        sys.exit(1)

    setup_logging(args.log_level, args.log_file)

    args.func(args)


if __name__ == '__main__':
    main()
