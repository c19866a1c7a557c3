#!/usr/bin/env python3
"""Entry point for ``python -m gridmdp``."""

from .cli import main_sync

if __name__ == "__main__":
    main_sync()
