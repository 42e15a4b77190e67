"""Batch command-line frontend."""

from .epstein_cli import build_parser, main

__all__ = ["build_parser", "main"]
