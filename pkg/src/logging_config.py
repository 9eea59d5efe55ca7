"""structlog setup shared by the CLI and the acceptance runner."""

from __future__ import annotations

import logging
import sys

import structlog

from .config import get_env, section


def configure_logging(level: str | None = None, *, json: bool | None = None) -> None:
    """Configure structlog for the process. Env (BDK_LOG_LEVEL, BDK_LOG_JSON) beats config.yaml."""
    cfg = section("logging")
    level_name = (level or get_env("BDK_LOG_LEVEL") or cfg.get("level") or "INFO").upper()
    if json is None:
        env_json = get_env("BDK_LOG_JSON").strip().lower()
        json = env_json in ("1", "true", "yes") if env_json else bool(cfg.get("json", False))

    numeric = logging.getLevelName(level_name)
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=numeric, force=True)

    renderer = structlog.processors.JSONRenderer() if json else structlog.dev.ConsoleRenderer(colors=False)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
