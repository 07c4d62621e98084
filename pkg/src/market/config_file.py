# ============================================================
# SRC/MARKET/CONFIG_FILE.PY
# ============================================================
"""Lecture d'un fichier de config plat `clé = valeur` décrivant un panier.

Exemple :
    # panier à 2 actifs
    d = 2
    strike = 100
    maturity = 1
    rate = 0.04
    style = american
    weights = 0.5, 0.5
    sigmas = 0.3, 0.2
    spot = 100            # scalaire (répété) ou liste
    corr.row.1 = 1, 0.5   # lignes de la matrice de corrélation...
    corr.row.2 = 0.5, 1
    corr.all = 0.5        # ...ou corrélation constante hors diagonale
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from src.errors import ConfigError, ValidationError
from src.market.basket import BasketSpec, ExerciseStyle, validate

logger = logging.getLogger(__name__)

SCALAR_KEYS = ("d", "strike", "maturity", "rate")
VECTOR_KEYS = ("weights", "sigmas", "spot")
REQUIRED_KEYS = ("d", "strike", "maturity", "rate", "weights", "sigmas", "spot")


def _float(value: str, line: int, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"nombre attendu, reçu {value!r}", line=line, key=key) from None


def _floats(value: str, line: int, key: str) -> list[float]:
    items = [v.strip() for v in value.split(",")]
    if any(v == "" for v in items):
        raise ConfigError("liste avec élément vide", line=line, key=key)
    return [_float(v, line, key) for v in items]


def parse_config_text(text: str) -> BasketSpec:
    entries: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError("ligne sans '='", line=lineno)
        key, value = (part.strip() for part in content.split("=", 1))
        if not key:
            raise ConfigError("clé vide", line=lineno)
        if key in entries:
            raise ConfigError(f"clé dupliquée (déjà ligne {entries[key][0]})", line=lineno, key=key)
        entries[key] = (lineno, value)

    for key in REQUIRED_KEYS:
        if key not in entries:
            raise ConfigError("clé obligatoire manquante", key=key)

    line_d, raw_d = entries["d"]
    d_value = _float(raw_d, line_d, "d")
    if d_value != int(d_value) or d_value < 1:
        raise ConfigError(f"d doit être un entier >= 1, reçu {raw_d!r}", line=line_d, key="d")
    d = int(d_value)

    scalars = {k: _float(entries[k][1], entries[k][0], k) for k in SCALAR_KEYS if k != "d"}

    vectors = {}
    for key in VECTOR_KEYS:
        line, value = entries[key]
        vec = _floats(value, line, key)
        if key == "spot" and len(vec) == 1:
            vec = vec * d
        if len(vec) != d:
            raise ConfigError(f"{d} valeurs attendues, reçu {len(vec)}", line=line, key=key)
        vectors[key] = vec

    style = ExerciseStyle.EUROPEAN
    if "style" in entries:
        line, value = entries["style"]
        try:
            style = ExerciseStyle(value.lower())
        except ValueError:
            raise ConfigError(f"style inconnu {value!r}", line=line, key="style") from None

    corr = _parse_corr(entries, d)

    known = set(REQUIRED_KEYS) | {"style", "corr.all"} | {f"corr.row.{i}" for i in range(1, d + 1)}
    for key, (line, _) in entries.items():
        if key not in known:
            raise ConfigError("clé inconnue", line=line, key=key)

    spec = BasketSpec(
        strike=scalars["strike"],
        maturity=scalars["maturity"],
        rate=scalars["rate"],
        weights=vectors["weights"],
        sigmas=vectors["sigmas"],
        corr=corr,
        spot=vectors["spot"],
        style=style,
    )
    try:
        return validate(spec)
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_corr(entries: dict[str, tuple[int, str]], d: int) -> np.ndarray:
    rows = {k: v for k, v in entries.items() if k.startswith("corr.row.")}
    if "corr.all" in entries and rows:
        line, _ = entries["corr.all"]
        raise ConfigError("corr.all et corr.row.i sont exclusifs", line=line, key="corr.all")

    if "corr.all" in entries:
        line, value = entries["corr.all"]
        corr = np.full((d, d), _float(value, line, "corr.all"))
        np.fill_diagonal(corr, 1.0)
        return corr

    if d == 1 and not rows:
        return np.ones((1, 1))

    corr = np.empty((d, d))
    for i in range(1, d + 1):
        key = f"corr.row.{i}"
        if key not in rows:
            raise ConfigError("ligne de corrélation manquante", key=key)
        line, value = rows[key]
        row = _floats(value, line, key)
        if len(row) != d:
            raise ConfigError(f"{d} valeurs attendues, reçu {len(row)}", line=line, key=key)
        corr[i - 1] = row
    return corr


def load_config(path: str | Path) -> BasketSpec:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"fichier introuvable : {path}")
    logger.info(f"📄 Lecture de la config {path}")
    return parse_config_text(path.read_text(encoding="utf-8"))
