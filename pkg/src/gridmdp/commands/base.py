"""Base command class and registry for the gridmdp CLI."""

import argparse
import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Optional

from ..config import Settings

logger = logging.getLogger(__name__)


class BaseCommand(ABC):
    """Base class for all gridmdp subcommands."""

    def __init__(self, settings: Settings):
        self.settings = settings

    @property
    @abstractmethod
    def name(self) -> str:
        """Subcommand name."""

    @property
    @abstractmethod
    def description(self) -> str:
        """One-line help text."""

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Declare the subcommand's flags."""

    @abstractmethod
    async def execute(self, args: argparse.Namespace) -> int:
        """Run the subcommand and return its exit code."""

    def emit(self, message: str) -> None:
        """Print a result line to stdout."""
        print(message)


class CommandRegistry:
    """Registry for CLI subcommands."""

    def __init__(self):
        self._commands: Dict[str, BaseCommand] = {}

    def register(self, command: BaseCommand) -> None:
        self._commands[command.name] = command
        logger.debug(f"Registered command: {command.name}")

    def register_multiple(self, commands: List[BaseCommand]) -> None:
        for command in commands:
            self.register(command)

    def get(self, name: str) -> Optional[BaseCommand]:
        return self._commands.get(name)

    def build_parser(self, prog: str = "gridmdp") -> argparse.ArgumentParser:
        """Top-level parser with one subparser per registered command."""
        parser = argparse.ArgumentParser(
            prog=prog, description="Predictive frequency control of storage-integrated grids"
        )
        parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")
        subparsers = parser.add_subparsers(dest="command", required=True)
        for command in self._commands.values():
            sub = subparsers.add_parser(command.name, help=command.description, description=command.description)
            command.add_arguments(sub)
        return parser
