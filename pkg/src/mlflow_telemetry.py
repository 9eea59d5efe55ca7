"""Optional MLflow sink for run summaries. Never raises; no-op if mlflow is missing or MLFLOW_DISABLE is set."""

from __future__ import annotations

import math
import os
from typing import Any

import structlog

log = structlog.get_logger("bdk.telemetry")


def _enabled() -> bool:
    return os.environ.get("MLFLOW_DISABLE", "").lower() not in ("1", "true", "yes")


def split_summary(summary: dict[str, Any]) -> tuple[dict[str, float], dict[str, str]]:
    """Finite numbers and booleans become metrics; everything else (inf flags, labels) becomes params."""
    metrics: dict[str, float] = {}
    params: dict[str, str] = {}
    for key, value in summary.items():
        if value is None:
            continue
        if isinstance(value, bool):
            metrics[key] = 1.0 if value else 0.0
        elif isinstance(value, (int, float)) and math.isfinite(value):
            metrics[key] = float(value)
        else:
            params[key] = str(value)[:500]
    return metrics, params


def log_run_metrics(
    *,
    run_name: str,
    summary: dict[str, Any],
    config: dict[str, Any] | None = None,
    tags: dict[str, str] | None = None,
) -> bool:
    """Log one run; returns True when something reached the tracking store."""
    if not _enabled():
        return False
    try:
        import mlflow
    except Exception:
        return False
    metrics, params = split_summary(summary)
    for key, value in (config or {}).items():
        params.setdefault(f"config.{key}", str(value)[:500])
    try:
        mlflow.set_tracking_uri(os.environ.get("MLFLOW_TRACKING_URI", "file:./mlruns"))
        with mlflow.start_run(run_name=run_name[:250]):
            if metrics:
                mlflow.log_metrics(metrics)
            if params:
                mlflow.log_params(params)
            if tags:
                mlflow.set_tags({k: str(v)[:500] for k, v in tags.items()})
    except Exception as exc:
        log.debug("mlflow_logging_skipped", error=str(exc))
        return False
    return True
