# app.py
import argparse
import json
import logging
import sys

import numpy as np

from config import configure_logging
from core.errors import ConfigurationError, RomError
from data.experiment_config import ExperimentConfig
from data.reports import write_csv
from stages.manager import METHODS, OFFLINE_STAGES, PODNN, PipelineManager, parse_parameter
from stages.sweep import parse_override, run_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser():
    parser = argparse.ArgumentParser(description='Reduced-order models for parametric Helmholtz and Maxwell problems')
    parser.add_argument('--log-level', default=None, help='Override LOG_LEVEL')
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add(name, help_text):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--config', required=True, help='Experiment configuration (JSON)')
        sub.add_argument('--output', default=None, help='Output directory (overrides output_dir)')
        sub.add_argument('--workers', type=int, default=None, help='Worker threads (overrides ROM_WORKERS)')
        return sub

    for name in OFFLINE_STAGES:
        sub = add(name, f'Run the {name} stage and its prerequisites')
        sub.add_argument('--force', action='store_true', help='Rebuild even when a matching artifact exists')
    add('eval', 'Evaluate G-POD, POD-NN and projection errors on the test set')
    add('bench', 'Time online queries of the three solvers')
    add('run', 'Run snapshots, pod, train and eval')
    sweep = add('sweep', 'Run the pipeline for every combination of config overrides')
    sweep.add_argument('--set', action='append', required=True, metavar='KEY=V1,V2',
                       help='Config key path and the values to sweep, e.g. decay.theta=0.05,0.1')

    solve = add('solve', 'Online solve at one parameter point')
    solve.add_argument('--y', required=True, help='Parameter point: file or inline comma-separated values')
    solve.add_argument('--method', choices=METHODS, default=PODNN)
    solve.add_argument('--L', type=int, default=None, help='Reduced basis size')
    solve.add_argument('--out', default=None, help='Write the DoF vector to this CSV file')
    return parser


def execute(args):
    config = ExperimentConfig.load(args.config)
    if args.command == 'sweep':
        if args.output:
            config = ExperimentConfig.from_dict(dict(config.to_dict(), output_dir=args.output))
        curves = run_sweep(config, [parse_override(text) for text in args.set], args.workers)
        print(json.dumps({"stage": "sweep", "status": "success", "data": {"variants": list(curves)}}, indent=2))
        return
    manager = PipelineManager(config, args.output, args.workers)

    if args.command in OFFLINE_STAGES:
        summary = manager.ensure(args.command, force=args.force)
    elif args.command in ('eval', 'bench'):
        summary = manager.ensure(args.command)
    elif args.command == 'run':
        report = manager.run_pipeline()
        summary = {"stage": "run", "status": "success", "data": {"rows": report.rows()}}
    else:
        y = parse_parameter(args.y, config.J)
        u = manager.solve(y, args.method, args.L)
        if args.out:
            write_csv(args.out, ["dof", "re", "im"], [(i, float(v.real), float(v.imag)) for i, v in enumerate(u)])
        summary = {"stage": "solve", "status": "success",
                   "data": {"method": args.method, "dofs": int(u.shape[0]), "norm": float(np.linalg.norm(u))}}
    print(json.dumps(summary, indent=2, default=str))


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        execute(args)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {str(e)}")
        return EXIT_CONFIG
    except RomError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return e.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
