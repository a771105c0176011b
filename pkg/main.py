"""Command line entry point: `python main.py <config-path> [--output DIR] [--seed N] [--quiet]`."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from config import settings
from jobs.experiment_jobs import run_experiment
from services.exceptions import ValveSimError
from services.experiment_config import parse_config


def configure_logging(level: str = settings.log_level, json_output: bool = settings.log_json) -> None:
    """Structured logging on top of stdlib logging."""
    log_level = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stdout,
        level=log_level,
        force=True,
    )

    renderer = structlog.processors.JSONRenderer() if json_output else structlog.dev.ConsoleRenderer()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="valvesim",
        description="Valve-protocol state transfer experiments on disordered XX chains",
    )
    parser.add_argument("config", type=Path, help="experiment config file (key = value lines)")
    parser.add_argument("--output", type=Path, default=None, help="output directory for artifacts")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed (unsigned 64-bit)")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("WARNING" if args.quiet else settings.log_level, settings.log_json)
    logger = structlog.get_logger()

    try:
        text = args.config.read_text()
    except OSError as e:
        print(f"error: cannot read config {args.config}: {e.strerror or e}", file=sys.stderr)
        return 1

    try:
        config = parse_config(text)
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
                return 2
            config = config.model_copy(update={"seed": args.seed})
        run_experiment(config, args.output)
    except ValveSimError as e:
        logger.error("Run failed", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
