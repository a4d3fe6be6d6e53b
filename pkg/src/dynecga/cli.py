"""Command line entry point: ``dynecga run|replicate|list-problems``."""

import argparse
import dataclasses
import logging
import sys

from .core import ConfigurationError
from .harness import (
    load_config,
    problem_catalog,
    replicate_experiment,
    run_batch,
    summarize,
    write_summary,
)

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="dynecga", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one configured batch")
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--scale", type=_positive_float, default=1.0, help="multiply population size and run count")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--seed", type=_seed, default=None, help="override base_seed")
    p.add_argument("--out", default=None, help="override output_dir")

    p = sub.add_parser("replicate", help="run one of the four experiment grids")
    p.add_argument("experiment", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=_positive_float, default=1.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=_seed, default=0)

    sub.add_parser("list-problems", help="show the problem catalog")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    try:
        if args.command == "list-problems":
            for name, doc in problem_catalog().items():
                print(f"{name:16s} {doc}")
        elif args.command == "run":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg = dataclasses.replace(cfg, base_seed=args.seed)
            if args.out is not None:
                cfg = dataclasses.replace(cfg, output_dir=args.out)
            cfg = cfg.scaled(args.scale)
            batch = run_batch(cfg, threads=max(1, args.threads))
            row = summarize(cfg.output_dir, batch)
            write_summary([row], f"{cfg.output_dir}/summary.csv")
            print(f"{row['cell']}: recovered {row['recovered_fraction']:.3f}, "
                  f"final mean best {row['final_mean_best']:.6g}, evaluations {row['evaluations']}")
        else:
            rows = replicate_experiment(args.experiment, args.out, args.scale, max(1, args.threads), args.seed)
            for row in rows:
                print(f"{row['cell']}: recovered {row['recovered_fraction']:.3f}, final mean best {row['final_mean_best']:.6g}")
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
