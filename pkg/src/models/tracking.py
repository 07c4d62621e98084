# ============================================================
# SRC/MODELS/TRACKING.PY
# ============================================================
"""Suivi MLflow optionnel des runs de benchmark (no-op si MLFLOW_TRACKING_URI absent)."""
from __future__ import annotations

import logging
import subprocess
from contextlib import contextmanager
from datetime import datetime
from typing import Iterator

import mlflow

from src.settings import Settings

logger = logging.getLogger(__name__)


def get_git_commit() -> str:
    try:
        return subprocess.check_output(["git", "rev-parse", "HEAD"], text=True, stderr=subprocess.DEVNULL).strip()
    except Exception:
        return "unknown"


def run_name(command: str, preset: str | None) -> str:
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    return f"{command}__{preset or 'config'}__{stamp}"


class RunTracker:
    """Façade minimale : métriques, paramètres et artefacts ; inerte si désactivée."""

    def __init__(self, enabled: bool):
        self.enabled = enabled

    def log_params(self, params: dict) -> None:
        if self.enabled:
            for key, value in params.items():
                mlflow.log_param(key, value)

    def log_metrics(self, metrics: dict) -> None:
        if not self.enabled:
            return
        for key, value in metrics.items():
            if value is None:
                continue
            try:
                mlflow.log_metric(key, float(value))
            except (TypeError, ValueError):
                logger.debug(f"métrique ignorée {key}={value!r}")

    def log_artifact(self, path: str) -> None:
        if self.enabled:
            mlflow.log_artifact(path)


@contextmanager
def tracked_run(settings: Settings, command: str, preset: str | None, params: dict) -> Iterator[RunTracker]:
    if not settings.tracking_uri:
        yield RunTracker(enabled=False)
        return

    mlflow.set_tracking_uri(settings.tracking_uri)
    mlflow.set_experiment(settings.experiment_name)
    name = run_name(command, preset)
    logger.info(f"🚀 Run MLflow {name} ({settings.tracking_uri})")
    with mlflow.start_run(run_name=name):
        mlflow.set_tag("git_commit", get_git_commit())
        mlflow.set_tag("command", command)
        tracker = RunTracker(enabled=True)
        tracker.log_params(params)
        yield tracker
