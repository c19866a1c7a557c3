"""Process-level settings read from the environment."""

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigurationError


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    """Environment configuration shared by every command."""

    log_level: str = "INFO"
    output_dir: Path = Path("results")
    workers: int = 1
    tree_dump_max_nodes: int = 10000

    @classmethod
    def from_env(cls) -> "Settings":
        # Load environment variables
        load_dotenv()

        workers = _int_env("GRIDMDP_WORKERS", 1)
        if workers < 1:
            raise ConfigurationError(f"GRIDMDP_WORKERS must be at least 1, got {workers}")
        return cls(
            log_level=os.getenv("GRIDMDP_LOG_LEVEL", "INFO").upper(),
            output_dir=Path(os.getenv("GRIDMDP_OUTPUT_DIR", "./results")),
            workers=workers,
            tree_dump_max_nodes=_int_env("GRIDMDP_TREE_DUMP_MAX_NODES", 10000),
        )
