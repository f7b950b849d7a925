#!/usr/bin/env python3
"""Entry point for the rough Kuramoto toolkit.

Configures basic logging and delegates to the Typer CLI.

Examples:
    python run.py simulate configs/sync.yaml --out runs/sync
    python run.py sweep configs/sync_seeds.yaml --workers 4
    python run.py graph-info twoBlockSigned:4 --n 8
"""
import logging

from src.cli.typer_main import app
from src.core.config import DEBUG


def _configure_logging() -> None:
    level = logging.DEBUG if DEBUG else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


if __name__ == "__main__":
    _configure_logging()
    app()
