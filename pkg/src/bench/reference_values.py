# ============================================================
# SRC/BENCH/REFERENCE_VALUES.PY
# ============================================================
"""Valeurs de référence publiées (m = N = 1000) pour ũ (pca), u_app (app), u_low (low).

Tables sélectionnables par le CLI :
    1 : européen, sets A-F        2 : américain (IT), sets A-F
    3 : européen, grille HL       4 : américain (IT), grille HL
"""
from __future__ import annotations

import pandas as pd

from src.market.basket import ExerciseStyle
from src.market.presets import HL_MATURITIES, HL_SIGMA1, HL_STRIKES, hl_preset_id

COLUMNS = ("pca", "app", "low")

# publiées avec 5 décimales, européen, sets A-F
_SETS_EUROPEAN = {
    "A": (0.17577, 0.17583, 0.17577),
    "B": (0.83257, 0.84125, 0.83942),
    "C": (0.77065, 0.78083, 0.77955),
    "D": (9.46550, 9.46570, 9.46523),
    "E": (9.10039, 9.10128, 9.09974),
    "F": (8.76358, 8.76554, 8.76255),
}

# américain, IT, sets A-F
_SETS_AMERICAN = {
    "A": (0.18110, 0.18120, 0.18114),
    "B": (1.07928, 1.08615, 1.08431),
    "C": (1.01641, 1.02435, 1.02306),
    "D": (9.86176, 9.86206, 9.86159),
    "E": (9.49645, 9.49774, 9.49620),
    "F": (9.15935, 9.16219, 9.15920),
}

# grille HL, lignes ordonnées T, K, σ1 (0.3 puis 0.9), européen
_HL_EUROPEAN = (
    (2.13020, 2.13271, 2.12954), (2.74982, 2.75307, 2.74963),
    (4.40336, 4.40715, 4.40328), (5.14582, 5.15003, 5.14595),
    (7.45442, 7.45827, 7.45427), (8.21316, 8.21738, 8.21313),
    (3.35805, 3.36599, 3.35620), (4.23834, 4.24750, 4.23731),
    (5.78199, 5.79261, 5.78114), (6.79656, 6.80770, 6.79599),
    (8.75406, 8.76551, 8.75329), (9.82315, 9.83486, 9.82235),
    (4.71159, 4.73545, 4.70532), (5.89254, 5.91682, 5.88742),
    (7.20593, 7.23607, 7.20149), (8.54494, 8.57378, 8.54048),
    (10.08246, 10.11611, 10.07862), (11.51843, 11.54974, 11.51371),
)

# grille HL, américain, IT
_HL_AMERICAN = (
    (2.17006, 2.17293, 2.16973), (2.79440, 2.79840, 2.79494),
    (4.50018, 4.50506, 4.50118), (5.24177, 5.24795, 5.24387),
    (7.64424, 7.65063, 7.64670), (8.38729, 8.39562, 8.39142),
    (3.48012, 3.48874, 3.47879), (4.37236, 4.38280, 4.37246),
    (6.01652, 6.02870, 6.01717), (7.03281, 7.04676, 7.03498),
    (9.14612, 9.16072, 9.14867), (10.19561, 10.21256, 10.20013),
    (5.06452, 5.08982, 5.05865), (6.27930, 6.30536, 6.27500),
    (7.78521, 7.81748, 7.78222), (9.14045, 9.17258, 9.13855),
    (10.94634, 10.98327, 10.94585), (12.36710, 12.40399, 12.36770),
)

_HL_ORDER = tuple(
    hl_preset_id(t, k, s) for t in HL_MATURITIES for k in HL_STRIKES for s in HL_SIGMA1
)

TABLE_STYLES = {
    1: ExerciseStyle.EUROPEAN,
    2: ExerciseStyle.AMERICAN,
    3: ExerciseStyle.EUROPEAN,
    4: ExerciseStyle.AMERICAN,
}

HL_ABS_TOL = 5e-3
SET_A_ABS_TOL = 1e-3
SETS_ABS_TOL = 2e-3
SETS_REL_TOL = 5e-4


def _frame(rows: dict) -> pd.DataFrame:
    df = pd.DataFrame.from_dict(rows, orient="index", columns=list(COLUMNS))
    df.index.name = "preset"
    return df


def reference_table(which: int) -> pd.DataFrame:
    if which == 1:
        return _frame(_SETS_EUROPEAN)
    if which == 2:
        return _frame(_SETS_AMERICAN)
    if which == 3:
        return _frame(dict(zip(_HL_ORDER, _HL_EUROPEAN)))
    if which == 4:
        return _frame(dict(zip(_HL_ORDER, _HL_AMERICAN)))
    raise ValueError(f"table inconnue : {which} (attendu 1, 2, 3 ou 4)")


def table_for(preset_id: str, style: ExerciseStyle) -> int:
    hl = preset_id.upper().startswith("HL")
    american = ExerciseStyle(style) is ExerciseStyle.AMERICAN
    return (3 if hl else 1) + (1 if american else 0)


def reference_value(preset_id: str, style: ExerciseStyle, column: str = "pca") -> float | None:
    table = reference_table(table_for(preset_id, style))
    if preset_id not in table.index:
        return None
    return float(table.loc[preset_id, column])


def tolerances(preset_id: str) -> tuple[float, float]:
    """(tolérance absolue, tolérance relative) de reproduction."""
    if preset_id.upper().startswith("HL"):
        return HL_ABS_TOL, 0.0
    if preset_id == "A":
        return SET_A_ABS_TOL, 0.0
    return SETS_ABS_TOL, SETS_REL_TOL
