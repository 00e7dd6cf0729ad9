"""structlog setup.

Log records go to standard error; standard output is reserved for data.
"""

import logging
import sys
from typing import Any, Optional

import structlog

from .config import get_settings

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def configure_logging(level: Optional[str] = None, json: Optional[bool] = None) -> None:
    """Configure structlog for the whole process.

    Args:
        level: Log level name; defaults to the monitoring settings.
        json: Render JSON lines instead of key/value pairs.
    """
    settings = get_settings().monitoring
    level = (level or settings.log_level).upper()
    if level not in LEVELS:
        raise ValueError(f"Unknown log level: {level}")
    json = settings.log_json if json is None else json

    renderer: Any = (
        structlog.processors.JSONRenderer()
        if json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, level)),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> Any:
    """Return a lazy logger, configuring defaults on first use."""
    if not structlog.is_configured():
        configure_logging()
    return structlog.get_logger(name)
