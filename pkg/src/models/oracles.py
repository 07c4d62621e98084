# ============================================================
# SRC/MODELS/ORACLES.PY
# ============================================================
"""Prix de référence indépendants du moteur EDP :
- put européen fermé (Black-Scholes),
- put américain par arbre binomial CRR,
- put européen sur panier par Monte Carlo (tirage exact de S_T).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from src.errors import DomainError
from src.market.basket import BasketSpec, covariance, payoff, validate
from src.market.spectral import eigendecompose

logger = logging.getLogger(__name__)

MC_BATCH_SIZE = 100_000


def bs_put(s: float, k: float, r: float, sigma: float, t: float) -> float:
    if min(s, k, sigma, t) <= 0:
        raise DomainError("bs_put exige S, K, σ, T > 0")
    vol = sigma * math.sqrt(t)
    d1 = (math.log(s / k) + (r + 0.5 * sigma**2) * t) / vol
    d2 = d1 - vol
    return float(k * math.exp(-r * t) * norm.cdf(-d2) - s * norm.cdf(-d1))


def bs_call(s: float, k: float, r: float, sigma: float, t: float) -> float:
    # parité call-put
    return bs_put(s, k, r, sigma, t) + s - k * math.exp(-r * t)


def crr_american_put(s: float, k: float, r: float, sigma: float, t: float, steps: int, american: bool = True) -> float:
    """Arbre recombinant de Cox-Ross-Rubinstein, exercice anticipé à chaque noeud."""
    if steps < 1:
        raise DomainError("steps doit être >= 1")
    dt = t / steps
    u = math.exp(sigma * math.sqrt(dt))
    d = 1.0 / u
    q = (math.exp(r * dt) - d) / (u - d)
    df = math.exp(-r * dt)

    # noeud j = nombre de hausses
    j = np.arange(steps + 1)
    values = np.maximum(k - s * u ** (2 * j - steps), 0.0)
    for n in range(steps - 1, -1, -1):
        values = df * (q * values[1:] + (1.0 - q) * values[:-1])
        if american:
            j = np.arange(n + 1)
            values = np.maximum(values, k - s * u ** (2 * j - n))
    return float(values[0])


@dataclass(frozen=True)
class McResult:
    price: float
    stderr: float
    paths: int


def basket_factor(spec: BasketSpec, factor: str = "spectral") -> np.ndarray:
    """Racine carrée L de Σ (L Lᵀ = Σ)."""
    cov = covariance(spec)
    if factor == "spectral":
        spectrum = eigendecompose(cov)
        return spectrum.eigenvectors * np.sqrt(spectrum.eigenvalues)
    if factor == "cholesky":
        return np.linalg.cholesky(cov)
    raise DomainError(f"facteur inconnu : {factor!r}")


def _pairwise(parts: list[np.ndarray]) -> np.ndarray:
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return _pairwise(parts[:mid]) + _pairwise(parts[mid:])


def mc_european_basket(
    spec: BasketSpec,
    paths: int,
    seed: int,
    factor: str = "spectral",
    batch_size: int = MC_BATCH_SIZE,
    workers: int | None = None,
) -> McResult:
    """Moyenne actualisée du payoff sur `paths` tirages de S_T, et son écart-type."""
    if paths < 1:
        raise DomainError("paths doit être >= 1")
    validate(spec)
    chol = basket_factor(spec, factor)
    drift = np.log(spec.spot) + (spec.rate - 0.5 * spec.sigmas**2) * spec.maturity
    scale = math.sqrt(spec.maturity)
    discount = math.exp(-spec.rate * spec.maturity)

    sizes = [batch_size] * (paths // batch_size)
    if paths % batch_size:
        sizes.append(paths % batch_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def batch(args) -> np.ndarray:
        size, child = args
        z = np.random.default_rng(child).standard_normal((size, spec.d))
        s_t = np.exp(drift + scale * z @ chol.T)
        v = discount * payoff(s_t, spec)
        return np.array([v.sum(), (v * v).sum()])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        partials = list(pool.map(batch, zip(sizes, children)))

    total, total_sq = _pairwise(partials)
    mean = total / paths
    var = max(total_sq / paths - mean * mean, 0.0) * paths / max(paths - 1, 1)
    stderr = math.sqrt(var / paths)
    logger.info(f"MC {paths} chemins (seed={seed}, facteur={factor}) : {mean:.6f} ± {stderr:.2e}")
    return McResult(price=float(mean), stderr=float(stderr), paths=paths)
