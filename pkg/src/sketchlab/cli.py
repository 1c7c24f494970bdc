"""Command-line entry point: ``sketchlab <predict|mc|kaczmarz|nystrom|gamma> ...``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ParseError, SketchLabError
from .experiments import ExperimentConfig, Mode, all_exceed_rank, parse_k_grid, parse_profile, run_experiment
from .io import format_csv, write_csv

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_K_EXCEEDS_RANK = 3

MODES = {
    "predict": Mode.PREDICT,
    "mc": Mode.LOWRANK,
    "kaczmarz": Mode.KACZMARZ,
    "nystrom": Mode.NYSTROM,
    "gamma": Mode.GAMMA,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchlab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="data file (libsvm, or dense CSV if it ends in .csv)")
    src.add_argument("--profile", help="exponential:ALPHA:N | polynomial:BETA:N | flat:N")
    common.add_argument("--format", choices=("libsvm", "csv"), help="override input format detection")
    common.add_argument("--rows", type=int, help="rows m of a synthesized matrix (default n)")
    common.add_argument("--normalize", action="store_true", help="scale to unit Frobenius norm (unit trace for kernels)")
    ks = common.add_mutually_exclusive_group(required=True)
    ks.add_argument("--k", help="sketch size, or a comma-separated list")
    ks.add_argument("--k-grid", help="a:b:step, inclusive")
    common.add_argument("--family", choices=("gaussian", "rademacher"), default="gaussian")
    common.add_argument("--trials", type=int, default=10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output CSV (default stdout)")

    sub.add_parser("predict", parents=[common], help="predicted low-rank error k/gamma and closed forms")
    sub.add_parser("mc", parents=[common], help="Monte Carlo low-rank error vs prediction")
    kz = sub.add_parser("kaczmarz", parents=[common], help="generalized Kaczmarz trajectory vs prediction")
    kz.add_argument("--steps", type=int, default=10)
    ny = sub.add_parser("nystrom", parents=[common], help="sketched Nystrom trace-norm error vs prediction")
    ny.add_argument("--sigma", type=float, help="RBF scale for point data")
    sub.add_parser("gamma", parents=[common], help="table of implicit and closed-form gamma")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = ExperimentConfig(
            mode=MODES[args.command],
            k_grid=parse_k_grid(args.k_grid if args.k_grid else args.k),
            input_path=args.input,
            input_format=args.format,
            profile=parse_profile(args.profile, args.normalize) if args.profile else None,
            rows=args.rows,
            family=args.family,
            seed=args.seed,
            trials=args.trials,
            sigma=getattr(args, "sigma", None),
            steps=getattr(args, "steps", 10),
            normalize=args.normalize,
            output_path=args.out,
        )
        rows = run_experiment(cfg)
    except ParseError as exc:
        print(f"sketchlab: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SketchLabError, ValueError, OSError) as exc:
        print(f"sketchlab: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        write_csv(rows, args.out)
    else:
        sys.stdout.write(format_csv(rows))
    if all_exceed_rank(rows):
        return EXIT_K_EXCEEDS_RANK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
