"""CLI Package"""

from src.cli.main import main

__all__ = ["main"]
