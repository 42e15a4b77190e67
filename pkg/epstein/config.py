"""Runtime settings for bounded searches and sampling.

Settings are layered: ``DEFAULT_SETTINGS`` first, then the YAML file named by
an explicit path, ``EPSTEIN_SETTINGS_PATH`` or ``<EPSTEIN_DATA_DIR>/settings.yaml``.
A missing or broken file never aborts a run; the defaults stay active and the
problem is recorded in :data:`SETTINGS_HEALTH`.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, validator

__all__ = [
    "Settings",
    "SettingsHealth",
    "DEFAULT_SETTINGS",
    "SETTINGS_HEALTH",
    "load_settings",
    "apply_settings",
    "get_settings",
    "reset_settings",
]

logger = logging.getLogger(__name__)

DATA_DIR = Path(os.getenv("EPSTEIN_DATA_DIR", Path(__file__).resolve().parents[1] / "data"))


class Settings(BaseModel):
    max_validation_vars: int = Field(20, ge=1, le=24)
    default_depth: int = Field(3, ge=0)
    default_samples: int = Field(100, ge=0)
    omega_letters: List[int] = Field(default_factory=lambda: [0, 1])
    omega_scan_size: int = Field(7, ge=2)
    fuzz_toggle_bound: int = Field(50, ge=0)
    max_separator_candidates: int = Field(20000, ge=1)
    max_signature_atoms: int = Field(14, ge=1, le=20)
    inexpressibility_max_bound: int = Field(6, ge=0)
    explicit_sweep_bound: int = Field(2, ge=0)
    witness_substitution_depth: int = Field(3, ge=0)
    lindenbaum_max_universe: int = Field(400, ge=1)

    class Config:
        extra = "forbid"
        allow_mutation = False

    @validator("omega_letters")
    def _letters_nonempty(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("omega_letters must name at least one letter")
        if any(index < 0 for index in value):
            raise ValueError("letter indices are natural numbers")
        return sorted(set(value))


DEFAULT_SETTINGS = Settings()


class SettingsHealth:
    """Track settings loading problems so callers can surface degradations."""

    def __init__(self) -> None:
        self._issues: Dict[str, str] = {}

    def record_success(self, source: str) -> None:
        self._issues.pop(source, None)

    def record_failure(self, source: str, error: str) -> None:
        self._issues[source] = error

    def reset(self) -> None:
        self._issues.clear()

    def snapshot(self) -> Dict[str, Any]:
        issues = [{"source": source, "error": message} for source, message in sorted(self._issues.items())]
        return {"status": "healthy" if not issues else "degraded", "issues": issues}


SETTINGS_HEALTH = SettingsHealth()

_ACTIVE: Settings = DEFAULT_SETTINGS


def _resolve_settings_path(path: Optional[str]) -> Path:
    if path:
        return Path(path)
    env_path = os.getenv("EPSTEIN_SETTINGS_PATH")
    if env_path:
        return Path(env_path)
    data_dir = Path(os.getenv("EPSTEIN_DATA_DIR", DATA_DIR))
    return data_dir / "settings.yaml"


def load_settings(path: Optional[str] = None) -> Settings:
    config_path = _resolve_settings_path(path)
    source = config_path.name

    if not config_path.exists():
        SETTINGS_HEALTH.record_failure(source, f"Missing settings file at {config_path}")
        logger.warning("Settings file %s not found; using defaults", config_path)
        return DEFAULT_SETTINGS

    try:
        with open(config_path, encoding="utf-8") as fh:
            content = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        logger.error("Failed to load settings %s: %s", config_path, exc)
        SETTINGS_HEALTH.record_failure(source, f"Failed to load {source}: {exc}")
        return DEFAULT_SETTINGS

    if not isinstance(content, dict):
        logger.error("Settings %s must be a mapping, got %s", config_path, type(content).__name__)
        SETTINGS_HEALTH.record_failure(source, f"Invalid settings {source}: not a mapping")
        return DEFAULT_SETTINGS

    try:
        settings = Settings(**content)
    except ValidationError as exc:
        logger.error("Invalid settings %s: %s", config_path, exc)
        SETTINGS_HEALTH.record_failure(source, f"Invalid settings {source}: {exc}")
        return DEFAULT_SETTINGS

    SETTINGS_HEALTH.record_success(source)
    logger.debug("Loaded settings from %s", config_path)
    return settings


def apply_settings(path: Optional[str] = None) -> Settings:
    global _ACTIVE
    _ACTIVE = load_settings(path)
    return _ACTIVE


def get_settings() -> Settings:
    return _ACTIVE


def reset_settings() -> None:
    """Restore defaults and clear health tracking; used by tests."""

    global _ACTIVE
    _ACTIVE = DEFAULT_SETTINGS
    SETTINGS_HEALTH.reset()
