"""Command-line application for gridmdp."""

import asyncio
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .commands import CommandRegistry, default_commands
from .config import Settings
from .errors import (
    ConfigurationError,
    DataFormatError,
    DegenerateDataError,
    DimensionMismatchError,
    GridMdpError,
    InfeasibleScheduleError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

USAGE_ERRORS = (
    ValidationError,
    ConfigurationError,
    DataFormatError,
    DegenerateDataError,
    DimensionMismatchError,
    InfeasibleScheduleError,
    FileNotFoundError,
    ValueError,
)


class GridMdpApp:
    """Parses arguments and dispatches to registered commands."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()
        self.registry = CommandRegistry()
        self.registry.register_multiple(default_commands(self.settings))
        self.parser = self.registry.build_parser()

    def _configure_logging(self, verbose: bool) -> None:
        level = logging.DEBUG if verbose else getattr(logging, self.settings.log_level, logging.INFO)
        logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
        logging.getLogger().setLevel(level)

    async def run(self, argv: Optional[List[str]] = None) -> int:
        """Run one command and return its exit code."""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return EXIT_OK if e.code in (0, None) else EXIT_USAGE
        self._configure_logging(args.verbose)

        command = self.registry.get(args.command)
        if command is None:
            logger.error(f"Unknown command '{args.command}'")
            return EXIT_USAGE

        try:
            return await command.execute(args)
        except USAGE_ERRORS as e:
            logger.error(f"{args.command} failed: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except GridMdpError as e:
            logger.error(f"{args.command} failed: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_FAILED


async def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        app = GridMdpApp()
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return await app.run(argv)


def main_sync() -> None:
    """Synchronous entry point for the console script."""
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(EXIT_FAILED)
