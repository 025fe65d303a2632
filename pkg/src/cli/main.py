import argparse
import logging
import os
import sys
from typing import List, Optional

current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
if project_root not in sys.path:
    sys.path.append(project_root)

from src.cli.commands import cmd_gen_data, cmd_optimize, cmd_sensitivity, cmd_sweep
from src.cli.experiments import EXPERIMENTS, ExperimentRunner
from src.cli.run_config import RunConfig
from src.config.config import setup_logging
from src.exceptions import EcoOptError
from src.reporting.report_writer import ReportWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="64-bit seed (falls back to ECOOPT_SEED)")
    common.add_argument("--weights", help="alpha,beta,gamma summing to 1")
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--log-base", dest="log_base", choices=["e", "10"])
    common.add_argument("--threads", type=int)
    common.add_argument("--no-timestamp", dest="no_timestamp", action="store_true")
    common.add_argument("--svg", action="store_true", help="also write SVG charts")
    common.add_argument("--html", action="store_true", help="also write interactive plotly pages")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="ecoopt",
        description="Multi-objective AI deployment optimization on synthetic sustainability data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", parents=[common], help="write synthetic datasets as CSV")
    selector = gen.add_mutually_exclusive_group()
    selector.add_argument("--all", action="store_true", help="all four builtin datasets (default)")
    selector.add_argument("--dataset", help="one builtin dataset by name")
    selector.add_argument("--spec-file", dest="spec_file", help="JSON generator spec")
    gen.add_argument("--missing", type=float, help="fraction of numeric cells to blank")

    optimize = sub.add_parser("optimize", parents=[common], help="solve and verify the optimum")
    optimize.add_argument("--grid-points", dest="grid_points", type=int,
                          help="also run the grid oracle with this many points per variable")

    sub.add_parser("sweep", parents=[common], help="optimum under the preset weight configurations")

    sensitivity = sub.add_parser("sensitivity", parents=[common], help="one-at-a-time parameter sensitivity")
    sensitivity.add_argument("--delta", type=float, help="relative perturbation in (0, 1)")

    experiment = sub.add_parser("experiment", parents=[common], help="run a reporting experiment")
    experiment.add_argument("name", help=f"one of {', '.join(EXPERIMENTS)}")
    experiment.add_argument("--data-dir", dest="data_dir", help="reuse CSVs written by gen-data")
    experiment.add_argument("--missing", type=float, help="fraction of numeric cells to blank")
    return parser


def run(args: argparse.Namespace) -> None:
    cfg = RunConfig.resolve(args)
    writer = ReportWriter(cfg.out_dir, args.command, seed=cfg.seed, no_timestamp=cfg.no_timestamp)
    logger.info(f"Running '{args.command}' with seed {cfg.seed} into {writer.out_dir}")

    if args.command == "gen-data":
        cmd_gen_data(
            cfg,
            writer,
            dataset=args.dataset,
            spec_file=args.spec_file,
            keep_file_seed=args.seed is None,
        )
    elif args.command == "optimize":
        cmd_optimize(cfg, writer)
    elif args.command == "sweep":
        cmd_sweep(cfg, writer)
    elif args.command == "sensitivity":
        cmd_sensitivity(cfg, writer)
    elif args.command == "experiment":
        ExperimentRunner(cfg, writer).run(args.name)


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except EcoOptError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
