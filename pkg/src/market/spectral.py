# ============================================================
# SRC/MARKET/SPECTRAL.PY
# ============================================================
"""Décomposition spectrale Σ = Q Λ Qᵀ de la matrice de covariance.

Jacobi cyclique (d ≤ ~20) : ordre déterministe des valeurs propres,
normalisation du signe des colonnes et classification des colonnes
(toutes positives / signes mixtes) utilisée par les conditions aux limites.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.errors import AssumptionViolation, ConvergenceError

logger = logging.getLogger(__name__)

TAU_SIGN = 1e-10
MAX_SWEEPS = 50
OFF_DIAG_REL_TOL = 1e-14
CLAMP_REL_TOL = 1e-10
DEGENERATE_REL_TOL = 1e-12
NEGLIGIBLE_REL = np.finfo(float).eps


class ColumnClass(str, Enum):
    ALL_POSITIVE = "all_positive"
    MIXED = "mixed"


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    column_classes: tuple[ColumnClass | None, ...]

    @property
    def d(self) -> int:
        return int(self.eigenvalues.size)

    def column_class(self, k: int) -> ColumnClass:
        """Classe de la colonne k ; lève AssumptionViolation si elle n'est pas classable."""
        cls = self.column_classes[k]
        if cls is None:
            raise AssumptionViolation(
                f"colonne {k + 1} de Q : ni strictement positive ni de signe mixte"
            )
        return cls


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.sqrt(2.0) * np.linalg.norm(a[np.triu_indices_from(a, k=1)]))


def _jacobi(sigma: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.array(sigma, dtype=float)
    d = a.shape[0]
    v = np.eye(d)
    scale = float(np.sqrt(np.sum(a**2)))
    target = OFF_DIAG_REL_TOL * scale

    for sweep in range(max_sweeps + 1):
        off = _off_diagonal_norm(a)
        if off <= target:
            logger.debug(f"Jacobi convergé en {sweep} balayages (off={off:.3e})")
            return np.diag(a).copy(), v
        if sweep == max_sweeps:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= NEGLIGIBLE_REL * (abs(a[p, p]) + abs(a[q, q])):
                    # au niveau de l'arrondi : annulé sans rotation
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # rotation des lignes puis des colonnes p et q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    raise ConvergenceError(
        f"Jacobi non convergé après {max_sweeps} balayages "
        f"(off={_off_diagonal_norm(a):.3e}, cible={target:.3e})"
    )


def _normalise_signs(q: np.ndarray) -> np.ndarray:
    q = q.copy()
    for k in range(q.shape[1]):
        # argmax renvoie le premier indice en cas d'égalité
        j = int(np.argmax(np.abs(q[:, k])))
        if q[j, k] < 0:
            q[:, k] = -q[:, k]
    return q


def _deterministic_order(lam: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ordre décroissant ; à l'intérieur d'un groupe dégénéré, ordre lexicographique
    des colonnes, et valeur propre commune (moyenne du groupe)."""
    order = np.argsort(-lam, kind="stable")
    tol = DEGENERATE_REL_TOL * max(float(np.max(np.abs(lam))), 1.0)
    groups: list[list[int]] = [[int(order[0])]]
    for k in order[1:]:
        if abs(lam[groups[-1][-1]] - lam[k]) <= tol:
            groups[-1].append(int(k))
        else:
            groups.append([int(k)])

    result: list[int] = []
    tied: list[float] = []
    for group in groups:
        result.extend(sorted(group, key=lambda c: tuple(-q[:, c])))
        tied.extend([float(np.mean(lam[group]))] * len(group))
    return np.array(result, dtype=int), np.array(tied)


def classify_column(column: np.ndarray, tau_sign: float = TAU_SIGN) -> ColumnClass | None:
    if np.all(column > tau_sign):
        return ColumnClass.ALL_POSITIVE
    if np.any(column > tau_sign) and np.any(column < -tau_sign):
        return ColumnClass.MIXED
    return None


def classify_columns(q: np.ndarray, tau_sign: float = TAU_SIGN) -> tuple[ColumnClass, ...]:
    """Classe chaque colonne de Q ; AssumptionViolation si l'une n'est pas classable."""
    classes = []
    for k in range(q.shape[1]):
        cls = classify_column(q[:, k], tau_sign)
        if cls is None:
            raise AssumptionViolation(
                f"colonne {k + 1} de Q : ni strictement positive ni de signe mixte"
            )
        classes.append(cls)
    return tuple(classes)


def eigendecompose(sigma: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    sigma = np.asarray(sigma, dtype=float)
    lam, q = _jacobi(sigma, max_sweeps)

    lam_max = float(np.max(lam))
    # bruit d'arrondi autour de 0 (matrices de rang incomplet) ramené à 0 exactement
    lam = np.where(np.abs(lam) <= CLAMP_REL_TOL * abs(lam_max), 0.0, lam)

    q = _normalise_signs(q)
    order, lam = _deterministic_order(lam, q)
    q = q[:, order]

    classes = tuple(classify_column(q[:, k]) for k in range(q.shape[1]))
    lam.setflags(write=False)
    q.setflags(write=False)
    return Spectrum(eigenvalues=lam, eigenvectors=q, column_classes=classes)
