"""
Command-line entry point: ``jetbrane <pipeline> <theory> [aux ...]``.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from loguru import logger

from jetbrane.consts import (
    DEFAULT_CLOSURE_JET_ORDER,
    DEFAULT_MAX_COEFF_DEGREE,
    DEFAULT_MAX_JET_ORDER,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
)
from jetbrane.exceptions import (
    ConfigurationError,
    DSLSemanticError,
    DSLSyntaxError,
    JetbraneError,
    SchemaError,
)
from jetbrane.pipeline import AUX_PIPELINES, PIPELINES, run_pipeline
from jetbrane.theories import read_text, theory_name
from jetbrane.weak import AnsatzConfig

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetbrane",
        description=(
            "Check gauge theories: Noether identities, symmetries, closure "
            "of the gauge algebra and the master equation."
        ),
    )
    parser.add_argument("pipeline", choices=PIPELINES)
    parser.add_argument(
        "theory", help="theory file, or the name of a bundled theory"
    )
    parser.add_argument(
        "aux",
        nargs="*",
        help="symmetry, gauge parameter, current or solution files",
    )
    parser.add_argument(
        "--format", choices=("json", "text"), default="text"
    )
    parser.add_argument(
        "--ansatz-order",
        type=int,
        default=DEFAULT_MAX_JET_ORDER,
        help="highest derivative of the equations used in certificates",
    )
    parser.add_argument(
        "--max-degree",
        type=int,
        default=DEFAULT_MAX_COEFF_DEGREE,
        help="polynomial degree of certificate coefficients",
    )
    parser.add_argument(
        "--test-order",
        type=int,
        default=DEFAULT_CLOSURE_JET_ORDER,
        help="jet order of field dependent closure test parameters",
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--log-file", type=Path)
    parser.add_argument(
        "-o", "--output", type=Path, help="also write the report here"
    )
    return parser


def configure_logging(verbose: int, log_file: Path | None) -> None:
    level = {0: "WARNING", 1: "INFO"}.get(verbose, "DEBUG")
    logger.remove()
    logger.add(sys.stderr, level=level)
    if log_file is not None:
        logger.add(log_file, level="DEBUG")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    configure_logging(args.verbose, args.log_file)

    if args.pipeline in AUX_PIPELINES and not args.aux:
        logger.error(f"pipeline `{args.pipeline}` needs an input file")
        return EXIT_USAGE
    try:
        cfg = AnsatzConfig(
            max_jet_order=args.ansatz_order,
            max_coeff_jet_order=args.ansatz_order,
            max_coeff_degree=args.max_degree,
            closure_jet_order=args.test_order,
        )
        text = read_text(args.theory)
        aux_texts = [read_text(name) for name in args.aux]
    except (ValueError, ConfigurationError, OSError) as e:
        logger.error(str(e))
        return EXIT_USAGE

    try:
        report = run_pipeline(
            args.pipeline,
            text,
            aux_texts,
            name=theory_name(args.theory),
            cfg=cfg,
            seed=args.seed,
            samples=args.samples,
        )
    except (DSLSyntaxError, DSLSemanticError) as e:
        logger.error(f"line {e.line}, column {e.column}: {e.msg}")
        return EXIT_USAGE
    except (ConfigurationError, SchemaError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except JetbraneError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED

    if args.format == "json":
        body = report.to_json() + "\n"
    else:
        body = report.to_text()
    sys.stdout.write(body)
    if args.output is not None:
        args.output.write_text(body, encoding="utf-8")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
