# ============================================================
# SRC/MARKET/TRANSFORM.PY
# ============================================================
"""Changements de variables s -> x -> y, payoff transformé ψ et valeurs au bord.

    x(s, t) = Qᵀ (ln(s/K) - b(t)),   b_i(t) = (σ_i²/2 - r) t
    y(x)    = arctan(x)/π + 1/2       (ℝ -> (0, 1))
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import DomainError
from src.market.basket import BasketSpec, ExerciseStyle
from src.market.spectral import ColumnClass, Spectrum

# |Qx + b(t)| <= 700 garde K·exp(.) dans les doubles
LOG_PRICE_MAX = 700.0
X_CLIP = 1e12


@dataclass(frozen=True)
class TransformContext:
    spectrum: Spectrum
    strike: float
    rate: float
    sigmas: np.ndarray
    x_max: float = LOG_PRICE_MAX

    def b(self, t: float) -> np.ndarray:
        return (0.5 * self.sigmas**2 - self.rate) * t


def make_context(spec: BasketSpec, spectrum: Spectrum) -> TransformContext:
    return TransformContext(
        spectrum=spectrum, strike=spec.strike, rate=spec.rate, sigmas=spec.sigmas
    )


def x_of_y(y):
    return np.clip(np.tan(np.pi * (np.asarray(y, dtype=float) - 0.5)), -X_CLIP, X_CLIP)


def y_of_x(x):
    return np.arctan(x) / np.pi + 0.5


def s_to_y(s, t: float, ctx: TransformContext) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("les prix doivent être strictement positifs")
    x = (np.log(s / ctx.strike) - ctx.b(t)) @ ctx.spectrum.eigenvectors
    return y_of_x(x)


def y_to_s(y, t: float, ctx: TransformContext) -> np.ndarray:
    """Inverse explicite de s_to_y (log-prix bornés par x_max)."""
    z = x_of_y(y) @ ctx.spectrum.eigenvectors.T + ctx.b(t)
    return ctx.strike * np.exp(np.clip(z, -ctx.x_max, ctx.x_max))


def psi(y, t: float, ctx: TransformContext, spec: BasketSpec):
    """Payoff transformé ψ(y, t) = φ(K exp[Qx + b(t)]) ; y de forme (..., d)."""
    basket = y_to_s(y, t, ctx) @ spec.weights
    return np.maximum(spec.strike - basket, 0.0)


def basket_gap_slice(
    active: Sequence[int],
    coords: Sequence[np.ndarray],
    anchor: np.ndarray,
    t: float,
    ctx: TransformContext,
    spec: BasketSpec,
):
    """K - Σ ω_i s_i sur une coupe : axes `active` variables, les autres fixés à l'ancre.

    `coords[a]` est diffusable (ex. y1[:, None], yl[None, :]) ; évite de
    matérialiser un tableau (..., d) sur les grilles 2D.
    """
    q = ctx.spectrum.eigenvectors
    x_anchor = x_of_y(anchor)
    inactive = [k for k in range(ctx.spectrum.d) if k not in active]
    z_fixed = ctx.b(t) + q[:, inactive] @ x_anchor[inactive]
    xs = [x_of_y(c) for c in coords]

    basket = 0.0
    for i in range(spec.d):
        z = z_fixed[i]
        for axis, x in zip(active, xs):
            z = z + q[i, axis] * x
        basket = basket + spec.weights[i] * np.exp(np.clip(z, -ctx.x_max, ctx.x_max))
    return spec.strike - spec.strike * basket


def boundary_value(face: tuple[int, int], t: float, ctx: TransformContext, style: ExerciseStyle) -> float:
    """Condition de Dirichlet sur la face (axe k, côté 0|1)."""
    axis, side = face
    if side == 0 and ctx.spectrum.column_class(axis) is ColumnClass.ALL_POSITIVE:
        if ExerciseStyle(style) is ExerciseStyle.AMERICAN:
            return ctx.strike
        return ctx.strike * float(np.exp(-ctx.rate * t))
    return 0.0
