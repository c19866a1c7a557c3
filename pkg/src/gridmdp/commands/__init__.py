"""CLI subcommands."""

from typing import List

from ..config import Settings
from .base import BaseCommand, CommandRegistry
from .estimate import EstimateCommand
from .run import RunCommand
from .synth import SynthCommand


def default_commands(settings: Settings) -> List[BaseCommand]:
    return [EstimateCommand(settings), RunCommand(settings), SynthCommand(settings)]


__all__ = [
    "BaseCommand",
    "CommandRegistry",
    "EstimateCommand",
    "RunCommand",
    "SynthCommand",
    "default_commands",
]
