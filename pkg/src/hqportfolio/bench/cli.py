"""Command-line entry point: ``hqportfolio {prepare,brute,run,report}``.

Exit status is 0 on success, 1 for usage or configuration errors and 2 for
data errors (missing or malformed files).
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..market_data import DataError
from .config import SAMPLE_PRICES, ConfigError, load_config
from . import pipeline

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hqportfolio", description="HQGA vs GA portfolio-selection benchmark")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prepare", help="sample optimization instances from a price CSV")
    p.add_argument("--prices", default=str(SAMPLE_PRICES), help="price CSV (default: bundled sample)")
    p.add_argument("--k", type=int, default=9)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--subset-seeds", type=_int_list, default=[1, 2, 3, 4, 5])
    p.add_argument("--out", required=True)

    p = sub.add_parser("brute", help="exhaustive optimum of every instance")
    p.add_argument("--instances", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (default: output_dir from the config)")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("report", help="aggregate run outputs")
    p.add_argument("--runs", required=True)
    p.add_argument("--brute", required=True)
    p.add_argument("--out", required=True)
    return parser


def _dispatch(args) -> None:
    if args.command == "prepare":
        if args.k < 1:
            raise UsageError("--k must be >= 1")
        if args.gamma < 0:
            raise UsageError("--gamma must be >= 0")
        if not args.subset_seeds or any(s < 0 for s in args.subset_seeds):
            raise UsageError("--subset-seeds must be non-negative integers")
        try:
            written = pipeline.prepare(args.prices, args.k, args.gamma, args.subset_seeds, args.out)
        except FileNotFoundError:
            raise DataError(f"{args.prices}: no such file") from None
        print(f"wrote {len(written)} instance file(s) to {args.out}")
    elif args.command == "brute":
        rows = pipeline.brute(args.instances, args.out)
        print(f"wrote {len(rows)} optimum row(s) to {args.out}")
    elif args.command == "run":
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        config = load_config(args.config)
        out = args.out or config.output_dir
        if out is None:
            raise UsageError("no --out given and the config has no output_dir")
        results = pipeline.run_experiment(config, out, jobs=args.jobs)
        print(f"wrote {len(results)} run file(s) to {out}")
    elif args.command == "report":
        written = pipeline.report(args.runs, args.brute, args.out)
        print(f"wrote {len(written)} report file(s) to {args.out}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _dispatch(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
