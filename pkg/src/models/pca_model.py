# ============================================================
# SRC/MODELS/PCA_MODEL.PY
# ============================================================
"""Approximation par ACP :

    ũ = w(1)(Y₀, T) + Σ_{l=2..d} [ w(1,l)(Y₀, T) - w(1)(Y₀, T) ]

Un problème 1D sur l'axe principal et un problème 2D par valeur propre
non nulle ; les termes sont résolus en parallèle et sommés par l croissant.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.market.basket import BasketSpec, covariance, validate
from src.market.spectral import Spectrum, eigendecompose
from src.market.transform import make_context, s_to_y
from src.pde.grid import build_axis_grid
from src.pde.stepper import ConstraintMode
from src.models.subproblem import make_subproblem, solve_subproblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaResult:
    value: float
    base: float
    corrections: tuple[tuple[int, float], ...]
    spectrum: Spectrum
    anchor: np.ndarray
    seconds: float


def pca_price(
    spec: BasketSpec,
    m: int,
    n_steps: int,
    mode: ConstraintMode = ConstraintMode.IT,
    workers: int | None = None,
) -> PcaResult:
    start = time.perf_counter()
    validate(spec)
    spectrum = eigendecompose(covariance(spec))
    ctx = make_context(spec, spectrum)
    anchor = s_to_y(spec.spot, spec.maturity, ctx)

    planes = [l for l in range(1, spectrum.d) if spectrum.eigenvalues[l] > 0.0]
    subproblems = [make_subproblem(spectrum, anchor, (0,), spec.style)]
    subproblems += [make_subproblem(spectrum, anchor, (0, l), spec.style) for l in planes]

    # la grille de l'axe 1 est partagée par tous les sous-problèmes
    grid_1 = build_axis_grid(m, anchor[0])

    def run(sub):
        grids = (grid_1,) + tuple(build_axis_grid(m, anchor[a]) for a in sub.axes[1:])
        return solve_subproblem(sub, spec, ctx, n_steps, mode, grids=grids)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        values = list(pool.map(run, subproblems))

    base = values[0]
    corrections = tuple((l, v - base) for l, v in zip(planes, values[1:]))
    total = base
    for _, delta in corrections:
        total += delta

    seconds = time.perf_counter() - start
    logger.info(
        f"ũ = {total:.8f} ({len(subproblems)} sous-problème(s), {seconds:.1f}s)"
    )
    return PcaResult(total, base, corrections, spectrum, anchor, seconds)
