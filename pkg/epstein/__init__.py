"""Generalised Epstein semantics: formulas, models, decision procedures and witnesses."""

from __future__ import annotations

__all__ = [
    "__version__",
]

__version__ = "0.3.0"
