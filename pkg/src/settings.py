# ============================================================
# SRC/SETTINGS.PY
# ============================================================
from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


@dataclass(frozen=True)
class Settings:
    log_level: str
    output_dir: str
    workers: int
    default_m: int
    default_n: int
    mc_paths: int
    seed: int
    tracking_uri: str | None
    experiment_name: str


def get_settings() -> Settings:
    """Lit la configuration depuis l'environnement (et le fichier .env)."""
    return Settings(
        log_level=os.getenv("BASKET_LOG_LEVEL", "INFO").upper(),
        output_dir=os.getenv("BASKET_OUTPUT_DIR", "reports"),
        workers=int(os.getenv("BASKET_WORKERS", str(_default_workers()))),
        default_m=int(os.getenv("BASKET_DEFAULT_M", "200")),
        default_n=int(os.getenv("BASKET_DEFAULT_N", "200")),
        mc_paths=int(os.getenv("BASKET_MC_PATHS", "1000000")),
        seed=int(os.getenv("BASKET_SEED", "2024")),
        tracking_uri=os.getenv("MLFLOW_TRACKING_URI") or None,
        experiment_name=os.getenv("BASKET_EXPERIMENT", "basket-pricing/pdcp"),
    )
