# ------------------------------------------------------------
# SCRIPT : presets.py
# ------------------------------------------------------------
# Registre des jeux de paramètres de référence :
# - A à F : paniers d = 5, 10, 15 (S0 = K·1)
# - HL    : panier d = 8 équipondéré, S0 = 40·1, grille
#           T ∈ {0.5, 1, 2} × K ∈ {35, 40, 45} × σ1 ∈ {0.3, 0.9}
#
# Identifiants : "A" … "F" et "HL-T<T>-K<K>-s<σ1>" (ex. HL-T0.5-K35-s0.3)
# ------------------------------------------------------------
from __future__ import annotations

import re

import numpy as np

from src.errors import DomainError
from src.market.basket import BasketSpec, ExerciseStyle

HL_MATURITIES = (0.5, 1.0, 2.0)
HL_STRIKES = (35.0, 40.0, 45.0)
HL_SIGMA1 = (0.3, 0.9)
HL_SPOT = 40.0
HL_RATE = 0.05
HL_CORR = 0.8
HL_OTHER_SIGMAS = (0.6, 0.1, 0.9, 0.3, 0.7, 0.8, 0.2)

SET_A_CORR = (
    (1.00, 0.79, 0.82, 0.91, 0.84),
    (0.79, 1.00, 0.73, 0.80, 0.76),
    (0.82, 0.73, 1.00, 0.77, 0.72),
    (0.91, 0.80, 0.77, 1.00, 0.90),
    (0.84, 0.76, 0.72, 0.90, 1.00),
)
SET_A_SIGMAS = (0.518, 0.648, 0.623, 0.570, 0.530)
SET_A_WEIGHTS = (0.381, 0.065, 0.057, 0.270, 0.227)

DEF_DECAY = 0.0413

_HL_PATTERN = re.compile(r"^HL-T([0-9.]+)-K([0-9.]+)-s([0-9.]+)$")


def constant_corr(d: int, rho: float) -> np.ndarray:
    corr = np.full((d, d), rho)
    np.fill_diagonal(corr, 1.0)
    return corr


def _equal_basket(d, strike, rate, sigma, corr, style) -> BasketSpec:
    return BasketSpec(
        strike=strike,
        maturity=1.0,
        rate=rate,
        weights=np.full(d, 1.0 / d),
        sigmas=np.full(d, sigma),
        corr=corr,
        spot=np.full(d, strike),
        style=style,
    )


def set_a(style=ExerciseStyle.EUROPEAN) -> BasketSpec:
    return BasketSpec(
        strike=1.0,
        maturity=1.0,
        rate=0.05,
        weights=SET_A_WEIGHTS,
        sigmas=SET_A_SIGMAS,
        corr=SET_A_CORR,
        spot=np.ones(5),
        style=style,
    )


def set_constant_corr(d: int, style=ExerciseStyle.EUROPEAN) -> BasketSpec:
    """Sets B (d=10) et C (d=15)."""
    return _equal_basket(d, 40.0, 0.06, 0.20, constant_corr(d, 0.25), style)


def set_decaying_corr(d: int, style=ExerciseStyle.EUROPEAN) -> BasketSpec:
    """Sets D, E, F : ρ_ij = exp(-0.0413 |i - j|)."""
    idx = np.arange(d)
    corr = np.exp(-DEF_DECAY * np.abs(idx[:, None] - idx[None, :]))
    return _equal_basket(d, 100.0, 0.04, 0.30, corr, style)


def hl_preset(maturity: float, strike: float, sigma1: float, style=ExerciseStyle.EUROPEAN) -> BasketSpec:
    d = 1 + len(HL_OTHER_SIGMAS)
    return BasketSpec(
        strike=strike,
        maturity=maturity,
        rate=HL_RATE,
        weights=np.full(d, 1.0 / d),
        sigmas=(sigma1,) + HL_OTHER_SIGMAS,
        corr=constant_corr(d, HL_CORR),
        spot=np.full(d, HL_SPOT),
        style=style,
    )


def _fmt(x: float) -> str:
    return f"{x:g}"


def hl_preset_id(maturity: float, strike: float, sigma1: float) -> str:
    return f"HL-T{_fmt(maturity)}-K{_fmt(strike)}-s{_fmt(sigma1)}"


HL_IDS = tuple(
    hl_preset_id(t, k, s) for t in HL_MATURITIES for k in HL_STRIKES for s in HL_SIGMA1
)
SET_IDS = ("A", "B", "C", "D", "E", "F")
PRESET_IDS = SET_IDS + HL_IDS

_SET_BUILDERS = {
    "A": set_a,
    "B": lambda style: set_constant_corr(10, style),
    "C": lambda style: set_constant_corr(15, style),
    "D": lambda style: set_decaying_corr(5, style),
    "E": lambda style: set_decaying_corr(10, style),
    "F": lambda style: set_decaying_corr(15, style),
}


def parse_hl_id(preset_id: str) -> tuple[float, float, float]:
    match = _HL_PATTERN.match(preset_id)
    if match is None:
        raise DomainError(f"identifiant HL invalide : {preset_id!r}")
    maturity, strike, sigma1 = (float(g) for g in match.groups())
    if maturity not in HL_MATURITIES or strike not in HL_STRIKES or sigma1 not in HL_SIGMA1:
        raise DomainError(f"preset HL hors grille : {preset_id!r}")
    return maturity, strike, sigma1


def get_preset(preset_id: str, style=ExerciseStyle.EUROPEAN) -> BasketSpec:
    """Construit le BasketSpec du preset (lève DomainError si inconnu)."""
    key = preset_id.strip()
    if key.upper() in _SET_BUILDERS:
        return _SET_BUILDERS[key.upper()](ExerciseStyle(style))
    if key.upper().startswith("HL"):
        return hl_preset(*parse_hl_id(key), style=ExerciseStyle(style))
    raise DomainError(f"preset inconnu : {preset_id!r} (attendus : A-F ou HL-T<T>-K<K>-s<σ1>)")
