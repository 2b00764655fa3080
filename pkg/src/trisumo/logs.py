"""Logging setup driven by the TRISUMO_LOG environment variable."""

from __future__ import annotations

import logging
import os

from .errors import ConfigError

ENV_VAR = "TRISUMO_LOG"

_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def configure_logging() -> None:
    """Apply the verbosity named by TRISUMO_LOG (default: warn)."""
    name = os.environ.get(ENV_VAR, "warn").strip().lower()
    if name not in _LEVELS:
        raise ConfigError(
            f"{ENV_VAR} must be one of {sorted(_LEVELS)}, got {name!r}"
        )
    logging.basicConfig(
        level=_LEVELS[name],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("trisumo").setLevel(_LEVELS[name])
