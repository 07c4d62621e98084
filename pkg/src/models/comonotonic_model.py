# ============================================================
# SRC/MODELS/COMONOTONIC_MODEL.PY
# ============================================================
"""Approximation comonotone u_app = z·u_low + (1 - z)·u_up.

u_low et u_up sont des paniers de covariance de rang un (σ remplacé par
ν·σ, resp. σ, corrélation 1) : une seule valeur propre non nulle, donc un
seul problème 1D chacun, passé par la même chaîne que l'ACP.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from src.errors import EngineInvariantError, NegativeCorrelationError
from src.market.basket import BasketSpec, validate
from src.models.pca_model import pca_price
from src.pde.stepper import ConstraintMode

logger = logging.getLogger(__name__)

DEGENERATE_REL_TOL = 1e-14
BOUNDS_REL_TOL = 1e-12


@dataclass(frozen=True)
class ComonotonicWeights:
    nu: np.ndarray
    lam_low: float
    lam_up: float
    a: float
    b: float
    c: float
    z: float


@dataclass(frozen=True)
class ComonotonicResult:
    u_app: float
    u_low: float
    u_up: float
    weights: ComonotonicWeights


def comonotonic_weights(spec: BasketSpec) -> ComonotonicWeights:
    validate(spec)
    rho, sigma, t = spec.corr, spec.sigmas, spec.maturity
    if np.any(rho < 0):
        raise NegativeCorrelationError("l'approche comonotone exige ρ_ij >= 0")

    ws = spec.weights * spec.spot
    wss = ws * sigma
    nu = (rho @ wss) / np.sqrt(wss @ rho @ wss)

    pair = np.outer(ws, ws)
    vol = np.outer(sigma, sigma) * t
    a = float(np.sum(pair * np.expm1(np.outer(nu, nu) * vol)))
    b = float(np.sum(pair * np.expm1(rho * vol)))
    c = float(np.sum(pair * np.expm1(vol)))

    if c - a <= DEGENERATE_REL_TOL * c:
        z = 1.0
    else:
        z = (c - b) / (c - a)

    return ComonotonicWeights(
        nu=nu,
        lam_low=float(np.sum((nu * sigma) ** 2)),
        lam_up=float(np.sum(sigma**2)),
        a=a,
        b=b,
        c=c,
        z=float(z),
    )


def rank_one_spec(spec: BasketSpec, sigmas) -> BasketSpec:
    """Même contrat, volatilités `sigmas`, corrélation identiquement 1."""
    return replace(spec, sigmas=sigmas, corr=np.ones((spec.d, spec.d)))


def comonotonic_price(
    spec: BasketSpec,
    m: int,
    n_steps: int,
    mode: ConstraintMode = ConstraintMode.IT,
    workers: int | None = None,
) -> ComonotonicResult:
    weights = comonotonic_weights(spec)
    low = pca_price(rank_one_spec(spec, weights.nu * spec.sigmas), m, n_steps, mode, workers).value
    up = pca_price(rank_one_spec(spec, spec.sigmas), m, n_steps, mode, workers).value
    z = weights.z

    u_app = z * low + (1.0 - z) * up
    if not 0.0 <= z <= 1.0:
        logger.warning(f"z = {z:.6f} hors de [0, 1] : u_app n'est plus une combinaison convexe")
    else:
        slack = BOUNDS_REL_TOL * max(abs(low), abs(up), 1.0)
        if not min(low, up) - slack <= u_app <= max(low, up) + slack:
            raise EngineInvariantError(
                f"u_app={u_app!r} hors de [u_low, u_up]=[{low!r}, {up!r}]"
            )

    logger.info(f"u_app = {u_app:.8f} (z={z:.6f}, u_low={low:.8f}, u_up={up:.8f})")
    return ComonotonicResult(u_app=u_app, u_low=low, u_up=up, weights=weights)
