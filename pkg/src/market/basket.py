# ============================================================
# SRC/MARKET/BASKET.PY
# ============================================================
"""Contrat de put sur panier + données de marché (Black-Scholes multi-actifs)."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from src.errors import CorrelationMatrixError, DomainError, WeightSumError

WEIGHT_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12
PSD_REL_TOL = 1e-10


class ExerciseStyle(str, Enum):
    EUROPEAN = "european"
    AMERICAN = "american"


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, ndmin=ndim)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BasketSpec:
    strike: float
    maturity: float
    rate: float
    weights: np.ndarray
    sigmas: np.ndarray
    corr: np.ndarray
    spot: np.ndarray
    style: ExerciseStyle = ExerciseStyle.EUROPEAN

    def __post_init__(self):
        object.__setattr__(self, "strike", float(self.strike))
        object.__setattr__(self, "maturity", float(self.maturity))
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "weights", _frozen_array(self.weights, 1))
        object.__setattr__(self, "sigmas", _frozen_array(self.sigmas, 1))
        object.__setattr__(self, "spot", _frozen_array(self.spot, 1))
        object.__setattr__(self, "corr", _frozen_array(self.corr, 2))
        object.__setattr__(self, "style", ExerciseStyle(self.style))

    @property
    def d(self) -> int:
        return int(self.weights.size)

    def with_style(self, style: ExerciseStyle) -> "BasketSpec":
        return replace(self, style=ExerciseStyle(style))

    def with_rate(self, rate: float) -> "BasketSpec":
        return replace(self, rate=rate)


def validate(spec: BasketSpec) -> BasketSpec:
    """Retourne la spec si tous les invariants sont respectés, sinon lève."""
    d = spec.d
    if d < 1:
        raise DomainError("le panier doit contenir au moins un actif")
    for name, arr in (("sigmas", spec.sigmas), ("spot", spec.spot)):
        if arr.shape != (d,):
            raise DomainError(f"{name} doit être de taille {d}, reçu {arr.shape}")
    if spec.corr.shape != (d, d):
        raise CorrelationMatrixError(f"corr doit être {d}x{d}, reçu {spec.corr.shape}")

    if not spec.strike > 0:
        raise DomainError(f"strike doit être > 0, reçu {spec.strike}")
    if not spec.maturity > 0:
        raise DomainError(f"maturity doit être > 0, reçu {spec.maturity}")
    if not spec.rate >= 0:
        raise DomainError(f"rate doit être >= 0, reçu {spec.rate}")
    if not np.all(spec.weights > 0):
        raise DomainError("tous les poids doivent être > 0")
    if not np.all(spec.sigmas > 0):
        raise DomainError("toutes les volatilités doivent être > 0")
    if not np.all(spec.spot > 0):
        raise DomainError("tous les spots doivent être > 0")

    total = float(np.sum(spec.weights))
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightSumError(f"somme des poids = {total!r}, attendu 1")

    rho = spec.corr
    if not np.all(np.isfinite(rho)):
        raise CorrelationMatrixError("corr contient des valeurs non finies")
    if np.max(np.abs(rho - rho.T)) > SYMMETRY_TOL:
        raise CorrelationMatrixError("corr n'est pas symétrique")
    if np.any(np.diag(rho) != 1.0):
        raise CorrelationMatrixError("la diagonale de corr doit valoir 1")
    if np.any(np.abs(rho) > 1.0):
        raise CorrelationMatrixError("coefficients de corr hors de [-1, 1]")

    cov = covariance(spec)
    smallest = float(np.linalg.eigvalsh(cov)[0])
    scale = float(np.max(np.abs(cov)))
    if smallest < -PSD_REL_TOL * scale:
        raise CorrelationMatrixError(
            f"covariance non semi-définie positive (plus petite valeur propre {smallest:.3e})"
        )
    return spec


def payoff(s, spec: BasketSpec):
    """max(K - Σ ω_i s_i, 0) ; `s` de forme (..., d)."""
    basket = np.asarray(s, dtype=float) @ spec.weights
    return np.maximum(spec.strike - basket, 0.0)


def covariance(spec: BasketSpec) -> np.ndarray:
    upper = np.triu(np.outer(spec.sigmas, spec.sigmas) * spec.corr)
    return upper + np.triu(upper, 1).T
