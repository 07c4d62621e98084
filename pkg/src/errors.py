# ============================================================
# SRC/ERRORS.PY
# ============================================================
"""Hiérarchie d'exceptions du moteur de pricing.

Les erreurs de validation (entrées utilisateur) et les erreurs numériques
(solveurs) sont séparées : le CLI les traduit en codes de sortie distincts.
"""
from __future__ import annotations


class BasketPricingError(Exception):
    """Racine de toutes les erreurs du projet."""


# ── Validation des entrées ───────────────────────────────────
class ValidationError(BasketPricingError, ValueError):
    pass


class WeightSumError(ValidationError):
    pass


class CorrelationMatrixError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NegativeCorrelationError(ValidationError):
    pass


class ConfigError(ValidationError):
    """Erreur de fichier de config, avec la ligne et la clé fautives."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"ligne {line}")
        if key is not None:
            where.append(f"clé '{key}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


# ── Erreurs numériques ───────────────────────────────────────
class NumericalError(BasketPricingError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass


class EngineInvariantError(NumericalError):
    pass


# ── Hypothèse structurelle sur les vecteurs propres ──────────
class AssumptionViolation(BasketPricingError):
    """Une colonne de Q n'est ni strictement positive ni de signe mixte."""
