"""Logging setup shared by the CLI and the report API."""

from __future__ import annotations

import logging
import os
from logging.config import dictConfig

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"


def setup_logging(level: str | None = None) -> None:
    """Configure toolkit-wide logging; later calls only adjust the level."""

    level = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    if getattr(setup_logging, "_configured", False):
        root = logging.getLogger()
        root.setLevel(level)
        for handler in root.handlers:
            handler.setLevel(level)
        return

    dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {"standard": {"format": LOG_FORMAT}},
            "handlers": {
                "stderr": {
                    "level": level,
                    "class": "logging.StreamHandler",
                    "formatter": "standard",
                    "stream": "ext://sys.stderr",
                }
            },
            # scipy IntegrationWarning and numpy RuntimeWarning arrive here
            "loggers": {"py.warnings": {"level": "WARNING"}},
            "root": {"handlers": ["stderr"], "level": level},
        }
    )
    logging.captureWarnings(True)
    logging.getLogger(__name__).debug("Logging configured at level %s", level)
    setup_logging._configured = True
