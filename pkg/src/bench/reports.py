# ============================================================
# SRC/BENCH/REPORTS.PY
# ============================================================
"""Sorties CSV (en-tête, point décimal, 10 chiffres significatifs) et affichage console."""
from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def write_csv(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"💾 CSV écrit : {path} ({len(df)} ligne(s))")
    return path


def default_output(output_dir: str | Path, command: str, label: str) -> Path:
    safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label)
    return Path(output_dir) / f"{command}_{safe}.csv"


def format_record(record: dict) -> str:
    lines = []
    for key, value in record.items():
        if isinstance(value, float):
            value = f"{value:.10g}"
        lines.append(f"  {key:<10} : {value}")
    return "\n".join(lines)
