# ============================================================
# SRC/MODELS/SUBPROBLEM.PY
# ============================================================
"""Sous-problèmes réduits : axe {1} (1D) ou plan {1, l} (2D), les autres
coordonnées étant fixées à l'ancre Y₀. Chaque résolution lit la valeur au
noeud de l'ancre, sans interpolation."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from src.errors import DomainError
from src.market.basket import BasketSpec, ExerciseStyle
from src.market.spectral import ColumnClass, Spectrum
from src.market.transform import TransformContext
from src.pde.grid import (
    AxisGrid,
    ObstacleSampler,
    assemble_axis_operator,
    build_axis_grid,
    initial_vector,
    make_plane,
)
from src.pde.stepper import AdiProblem, ConstraintMode, integrate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubProblem:
    axes: tuple[int, ...]
    lams: tuple[float, ...]
    anchor: np.ndarray
    classes: tuple[ColumnClass, ...]
    style: ExerciseStyle

    @property
    def label(self) -> str:
        return "w(" + ",".join(str(a + 1) for a in self.axes) + ")"


def make_subproblem(spectrum: Spectrum, anchor, axes, style) -> SubProblem:
    """Lève AssumptionViolation si une colonne active n'est pas classable."""
    axes = tuple(int(a) for a in axes)
    if axes[0] != 0 or len(axes) not in (1, 2) or (len(axes) == 2 and axes[1] == 0):
        raise DomainError(f"axes de sous-problème invalides : {axes}")
    return SubProblem(
        axes=axes,
        lams=tuple(float(spectrum.eigenvalues[a]) for a in axes),
        anchor=np.asarray(anchor, dtype=float),
        classes=tuple(spectrum.column_class(a) for a in axes),
        style=ExerciseStyle(style),
    )


def constraint_mode(style: ExerciseStyle, mode: ConstraintMode) -> ConstraintMode:
    if ExerciseStyle(style) is ExerciseStyle.EUROPEAN:
        return ConstraintMode.UNCONSTRAINED
    mode = ConstraintMode(mode)
    if mode is ConstraintMode.UNCONSTRAINED:
        raise DomainError("une option américaine exige le mode ep ou it")
    return mode


def solve_subproblem(
    sub: SubProblem,
    spec: BasketSpec,
    ctx: TransformContext,
    n_steps: int,
    mode: ConstraintMode,
    grids: tuple[AxisGrid, ...] | None = None,
    m: int | None = None,
) -> float:
    """Intègre le sous-problème jusqu'à T et renvoie w(Y₀, T)."""
    start = time.perf_counter()
    if grids is None:
        if m is None:
            raise DomainError("il faut fournir les grilles ou m")
        grids = tuple(build_axis_grid(m, sub.anchor[a]) for a in sub.axes)

    share = 1.0 / len(sub.axes)
    operators = tuple(
        assemble_axis_operator(grid, lam, share * spec.rate, ctx, sub.style, axis)
        for grid, lam, axis in zip(grids, sub.lams, sub.axes)
    )
    plane = make_plane(sub.axes, grids, sub.anchor)
    w0 = initial_vector(plane, ctx, spec)

    mode = constraint_mode(sub.style, mode)
    obstacle = None
    if mode is not ConstraintMode.UNCONSTRAINED:
        obstacle = ObstacleSampler(plane, ctx, spec)

    state = integrate(AdiProblem(operators, w0, spec.maturity, obstacle), n_steps, mode)
    index = tuple(g.anchor_index for g in grids)
    value = float(state.w[index])
    logger.info(
        f"{sub.label} {sub.style.value}/{mode.value} m={grids[0].m} N={n_steps} "
        f"-> {value:.8f} ({time.perf_counter() - start:.2f}s)"
    )
    return value
