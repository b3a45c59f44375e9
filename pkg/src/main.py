#!/usr/bin/env python3
"""
Main entry point for the temporal influence maximization engine.
Subcommands cover sampling, simulation, seeding, experiments, dataset
generation, the counterexample search and a few inspection helpers.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from src.baselines import SEEDERS, SeedingContext, select_seeds
from src.config import EngineConfig
from src.config_loader import ConfigLoader
from src.diffusion import (DiffusionParams, InfluenceEvaluator, estimate_spread_mc, simulate_cpsir_once,
                           write_realization_csv)
from src.experiment import ExperimentRunner
from src.harness import (ExperimentSpec, compare_models, export_csv, find_counterexample, generate_synthetic_ba,
                         spread_percent)
from src.seeding import (GuardRefusedError, SelectionConfig, export_selection_csv, prefix_objectives,
                         read_node_list)
from src.tgraph import (Horizon, build_snapshots, load_edge_list, network_summary, sample_timestamps,
                        write_audit_csv, write_edge_list, write_schedule)
from src.utils import print_summary, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_IO = 3
EXIT_GUARD = 4


def _int_list(text: str) -> List[int]:
    return [int(item) for item in text.split(',') if item.strip()]


def _float_list(text: str) -> List[float]:
    return [float(item) for item in text.split(',') if item.strip()]


def _window(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"active window must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='YAML config file (default: config.yaml if present)')
    common.add_argument('--log-level', dest='log_level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument('--p0', type=float)
    model.add_argument('--alpha', type=float)
    model.add_argument('--beta', type=float)
    model.add_argument('--gamma', type=float)
    model.add_argument('--tau', type=float, help='activity window in timestamp units')
    model.add_argument('--window', type=int, help='snapshot window width')
    model.add_argument('--seed', type=int, help='rng seed')
    model.add_argument('--directed', action='store_true')
    model.add_argument('--horizon', type=int, nargs=2, metavar=('START', 'END'))
    model.add_argument('--params', help='diffusion parameter block (key=value lines)')

    parser = argparse.ArgumentParser(prog='python -m src.main',
                                     description='Temporal network influence maximization (cpSI-R)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('sample', parents=[common, model], help='sample snapshot timestamps')
    p.add_argument('edges')
    p.add_argument('--eta', type=float)
    p.add_argument('--out', help='write the selected window indices')
    p.add_argument('--audit', help='write the index,score,step_used audit CSV')

    p = sub.add_parser('simulate', parents=[common, model], help='Monte Carlo cpSI-R spread of a seed set')
    p.add_argument('edges')
    p.add_argument('--seeds', type=_int_list, help='comma-separated seed ids')
    p.add_argument('--seeds-file', dest='seeds_file')
    p.add_argument('--mc', type=int)
    p.add_argument('--out', help='write node,activation_time of the first realization')

    p = sub.add_parser('seed', parents=[common, model], help='run one seeder')
    p.add_argument('edges')
    p.add_argument('--method', default='ours', choices=sorted(SEEDERS))
    p.add_argument('--k', type=int)
    p.add_argument('--eta', type=float)
    p.add_argument('--min-iter', dest='min_iter', type=int)
    p.add_argument('--out', help='write rank,node,objective_after CSV')

    p = sub.add_parser('experiment', parents=[common, model], help='run a (k, eta, method) grid')
    p.add_argument('dataset', help='edge-list path or ba:<nodes>:<events>')
    p.add_argument('--method', dest='methods', default='ours', help='comma-separated seeder names')
    p.add_argument('--k', dest='k_list', type=_int_list, default=None, help='comma-separated budgets')
    p.add_argument('--eta', dest='eta_list', type=_float_list, default=None, help='comma-separated thresholds')
    p.add_argument('--mc', type=int)
    p.add_argument('--min-iter', dest='min_iter', type=int)
    p.add_argument('--workers', type=int)
    p.add_argument('--out', default='results.csv')
    p.add_argument('--no-timing', dest='no_timing', action='store_true', help='write runtime_seconds as 0')
    p.add_argument('--huge', action='store_true')

    p = sub.add_parser('generate', parents=[common], help='synthetic preferential-attachment network')
    p.add_argument('--nodes', type=int, required=True)
    p.add_argument('--events', type=int, required=True)
    p.add_argument('--seed', type=int)
    p.add_argument('--out', required=True)
    p.add_argument('--huge', action='store_true')

    p = sub.add_parser('counterexample', parents=[common], help='search for non-monotone/non-submodular spread')
    p.add_argument('--window', dest='active_window', type=_window, default=1.0, help="active window ('inf' allowed)")
    p.add_argument('--activation-prob', dest='activation_prob', type=float, default=1.0)
    p.add_argument('--max-nodes', dest='max_nodes', type=int, default=6)
    p.add_argument('--max-windows', dest='max_windows', type=int, default=4)
    p.add_argument('--budget', type=int, default=10_000)
    p.add_argument('--seed', type=int)

    p = sub.add_parser('stats', parents=[common], help='dataset statistics')
    p.add_argument('edges')
    p.add_argument('--directed', action='store_true')

    p = sub.add_parser('compare', parents=[common, model], help='cpSI-R vs SIR under shared randomness')
    p.add_argument('edges')
    p.add_argument('--seeds', type=_int_list)
    p.add_argument('--seeds-file', dest='seeds_file')
    p.add_argument('--recovery', type=float, default=0.1)
    p.add_argument('--mc', type=int)

    p = sub.add_parser('sample-config', parents=[common], help='write a documented config.yaml')
    p.add_argument('--out', default='config.yaml')

    return parser


def load_engine_config(args) -> EngineConfig:
    """defaults < YAML < environment < --params file < CLI flags."""
    engine_config = EngineConfig()
    yaml_config = ConfigLoader.load_config(args.config)
    if yaml_config:
        engine_config.update_from_yaml(yaml_config)
    engine_config.update_from_env()
    if getattr(args, 'params', None):
        with open(args.params, 'r', encoding='utf-8') as handle:
            engine_config.update_from_params(DiffusionParams.from_text(handle.read()))
    engine_config.update_from_args(args)
    engine_config.validate()
    return engine_config


def _horizon(args) -> Optional[Horizon]:
    if getattr(args, 'horizon', None) is None:
        return None
    start, end = args.horizon
    return Horizon(start, end)


def _seeds(args) -> List[int]:
    if args.seeds_file:
        return read_node_list(args.seeds_file)
    if args.seeds:
        return args.seeds
    raise ValueError("give seeds with --seeds or --seeds-file")


def _selection_config(engine_config: EngineConfig, args) -> SelectionConfig:
    return SelectionConfig(k=engine_config.k, min_iter=engine_config.min_iter, horizon=_horizon(args),
                           eta=engine_config.eta, weights=engine_config.similarity_weights(),
                           window_width=engine_config.window_width,
                           invert_threshold=engine_config.invert_threshold,
                           max_rounds=engine_config.max_rounds)


def cmd_sample(args, engine_config: EngineConfig) -> int:
    net = load_edge_list(args.edges, directed=args.directed)
    series = build_snapshots(net, engine_config.window_width)
    schedule = sample_timestamps(series, engine_config.eta, engine_config.similarity_weights(),
                                 engine_config.invert_threshold)
    print(f"Selected {len(schedule)} of {len(series)} snapshots at eta={engine_config.eta}: "
          f"{list(schedule.selected)}")
    if args.out:
        write_schedule(schedule, args.out)
    if args.audit:
        write_audit_csv(schedule, args.audit)
    return EXIT_OK


def cmd_simulate(args, engine_config: EngineConfig) -> int:
    net = load_edge_list(args.edges, directed=args.directed)
    seeds = _seeds(args)
    params = engine_config.diffusion_params()
    horizon = _horizon(args)
    estimate = estimate_spread_mc(net, seeds, params, horizon, engine_config.mc_realizations,
                                  engine_config.rng_seed)
    pct, pct_stderr = spread_percent(estimate, net.node_count)
    print(f"Spread of {sorted(set(seeds))}: {estimate.mean:.4f} +/- {estimate.stderr:.4f} nodes "
          f"({pct:.3f}% +/- {pct_stderr:.3f}) over {estimate.n_realizations} realizations")
    if args.out:
        write_realization_csv(simulate_cpsir_once(net, seeds, params, horizon, engine_config.rng_seed), args.out)
    return EXIT_OK


def cmd_seed(args, engine_config: EngineConfig) -> int:
    net = load_edge_list(args.edges, directed=args.directed)
    context = SeedingContext(net, engine_config.diffusion_params(), _selection_config(engine_config, args),
                             rng_seed=engine_config.rng_seed)
    started = time.perf_counter()
    selection = select_seeds(args.method, context, engine_config.k, engine_config.baseline_params())
    elapsed = time.perf_counter() - started
    print(f"{args.method}: seeds {list(selection.seeds)} objective {selection.objective:.6f} "
          f"({selection.evaluations} evaluations, {elapsed:.2f}s)")
    if args.out:
        evaluator = InfluenceEvaluator(net, context.diffusion, context.schedule, context.horizon)
        export_selection_csv(selection.seeds, prefix_objectives(list(selection.seeds), evaluator), args.out)
    return EXIT_OK


def cmd_experiment(args, engine_config: EngineConfig) -> int:
    spec = ExperimentSpec(
        dataset=args.dataset,
        methods=tuple(name.strip() for name in args.methods.split(',') if name.strip()),
        k_values=tuple(args.k_list or [engine_config.k]),
        eta_values=tuple(args.eta_list or [engine_config.eta]),
        diffusion=engine_config.diffusion_params(),
        mc_realizations=engine_config.mc_realizations,
        rng_seed=engine_config.rng_seed,
        window_width=engine_config.window_width,
        min_iter=engine_config.min_iter,
        baseline=engine_config.baseline_params(),
        directed=args.directed,
        record_runtime=engine_config.record_runtime,
        allow_huge=args.huge,
    )
    runner = ExperimentRunner(workers=engine_config.workers, huge_event_limit=engine_config.huge_event_limit,
                              weights=engine_config.similarity_weights())
    print(f"🚀 Running experiment on {spec.dataset}")
    started = time.perf_counter()
    rows = runner.run(spec)
    export_csv(rows, args.out)
    print_summary(runner.summarize(rows, time.perf_counter() - started))
    print(f"💾 Results saved to: {args.out}")
    return EXIT_OK


def cmd_generate(args, engine_config: EngineConfig) -> int:
    net = generate_synthetic_ba(args.nodes, args.events, engine_config.rng_seed, allow_huge=args.huge,
                                huge_limit=engine_config.huge_event_limit)
    write_edge_list(net, args.out)
    print(f"Generated {net.node_count} nodes / {net.num_events} events -> {args.out}")
    return EXIT_OK


def cmd_counterexample(args, engine_config: EngineConfig) -> int:
    report = find_counterexample(activation_prob=args.activation_prob, active_window=args.active_window,
                                 max_nodes=args.max_nodes, max_windows=args.max_windows,
                                 rng_seed=engine_config.rng_seed, budget=args.budget)
    if report is None:
        print(f"No witness found within {args.budget} instances")
        return EXIT_OK
    for witness in (report.monotonicity, report.submodularity):
        if witness is not None:
            print(witness.describe())
    print(f"Searched {report.instances_searched} instances")
    return EXIT_OK


def cmd_stats(args, engine_config: EngineConfig) -> int:
    net = load_edge_list(args.edges, directed=args.directed)
    for key, value in network_summary(net).items():
        print(f"  {key:<15} {value}")
    return EXIT_OK


def cmd_compare(args, engine_config: EngineConfig) -> int:
    net = load_edge_list(args.edges, directed=args.directed)
    result = compare_models(net, _seeds(args), engine_config.diffusion_params(), args.recovery, _horizon(args),
                            engine_config.mc_realizations, engine_config.rng_seed)
    for name in ('cpsir', 'sir'):
        estimate = result[name]
        print(f"  {name:<6} {estimate.mean:.4f} +/- {estimate.stderr:.4f}")
    print(f"  SIR set contained in cpSI-R set in {100 * result['dominance_fraction']:.1f}% of realizations")
    return EXIT_OK


def cmd_sample_config(args, engine_config: EngineConfig) -> int:
    ConfigLoader.create_sample_config(Path(args.out))
    print(f"✅ Sample config file created at: {args.out}")
    return EXIT_OK


COMMANDS = {
    'sample': cmd_sample,
    'simulate': cmd_simulate,
    'seed': cmd_seed,
    'experiment': cmd_experiment,
    'generate': cmd_generate,
    'counterexample': cmd_counterexample,
    'stats': cmd_stats,
    'compare': cmd_compare,
    'sample-config': cmd_sample_config,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ARGUMENT

    try:
        engine_config = load_engine_config(args)
        setup_logging(engine_config.log_level, engine_config.log_file)
        logger.debug(str(engine_config))
        return COMMANDS[args.command](args, engine_config)
    except GuardRefusedError as e:
        logger.error(f"{args.command} refused: {e}")
        print(f"❌ Refused: {e}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_ARGUMENT
    except OSError as e:
        logger.error(f"{args.command} failed with I/O error: {e}")
        print(f"❌ I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        print("\n⚠️  Interrupted by user", file=sys.stderr)
        return 130


if __name__ == '__main__':
    sys.exit(main())
