#!/usr/bin/env python3
"""
Triangle Compose - handle-splicing compositions of triangle group representations

Main entry point for the command-line tool.
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from src.app_controller import PipelineController
from src.cli import EXIT_UNEXPECTED, build_parser, load_settings, run_command


def setup_logging(level: str = "INFO", log_dir: Optional[str] = "logs"):
    """Set up logging configuration; stdout stays reserved for command output.

    Without ``log_dir`` only the stderr handler is installed.
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        try:
            path = Path(log_dir)
            path.mkdir(parents=True, exist_ok=True)
            handlers.append(logging.FileHandler(path / "triangle_compose.log", encoding="utf-8"))
        except OSError as e:
            print(f"Could not open log directory {log_dir}: {e}", file=sys.stderr)

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv

    # stderr only until the configured log directory is known
    setup_logging(args.log_level or "INFO", None)
    settings = load_settings(args)
    setup_logging(settings.log_level, settings.log_dir)
    logger = logging.getLogger(__name__)
    logger.debug(f"Starting {PipelineController(settings).get_application_info()}")

    try:
        result = run_command(args, settings)
        logger.debug(f"Command {args.command} finished with exit code {result}")
        return result
    except Exception as e:
        logger.exception(f"Unhandled exception in main: {e}")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(130)
