# ============================================================
# SRC/BENCH/RUNNERS.PY
# ============================================================
"""Expériences : prix ponctuel, tables de référence, convergence spatiale,
étude temporelle EP / IT, contrôles par oracles et spectre de Σ."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from src.bench.reference_values import (
    COLUMNS,
    TABLE_STYLES,
    reference_table,
    reference_value,
    tolerances,
)
from src.market.basket import BasketSpec, ExerciseStyle, covariance, payoff, validate
from src.market.presets import get_preset, parse_hl_id
from src.market.spectral import eigendecompose
from src.models.comonotonic_model import comonotonic_price, comonotonic_weights, rank_one_spec
from src.models.evaluation import abs_errors, compare_to_reference, fit_order
from src.models.oracles import bs_put, crr_american_put, mc_european_basket
from src.models.pca_model import pca_price
from src.pde.stepper import ConstraintMode

logger = logging.getLogger(__name__)

STYLE_SLACK = 1e-8
D1_EUROPEAN_REL_TOL = 1e-4
D1_AMERICAN_REL_TOL = 2e-3
MC_ABS_REL_TOL = 2e-3
MC_STDERR_MULT = 3.0
CRR_STEPS = 10_000
REFERENCE_M = 1000
REFERENCE_N = 1000

# bornes attendues des ordres ajustés (avertissement seulement)
SPATIAL_ORDER_MIN = {ExerciseStyle.EUROPEAN: 1.7, ExerciseStyle.AMERICAN: 1.4}
EP_ORDER_BAND = (0.8, 1.2)
IT_ORDER_MIN = 1.3


class Method(str, Enum):
    PCA = "pca"
    COMONOTONIC = "comonotonic"
    BOTH = "both"

    @property
    def columns(self) -> tuple[str, ...]:
        return {"pca": ("pca",), "comonotonic": ("app",), "both": ("pca", "app")}[self.value]


@dataclass(frozen=True)
class RunConfig:
    spec: BasketSpec
    label: str
    method: Method = Method.BOTH
    mode: ConstraintMode = ConstraintMode.IT
    m: int = 200
    n_steps: int = 200
    workers: int | None = None
    seed: int = 2024
    is_preset: bool = True


def static_bound(spec: BasketSpec) -> float:
    """Borne inférieure sans arbitrage au point S₀."""
    if spec.style is ExerciseStyle.AMERICAN:
        return float(payoff(spec.spot, spec))
    return max(spec.strike * math.exp(-spec.rate * spec.maturity) - float(spec.spot @ spec.weights), 0.0)


# ============================================================
# price
# ============================================================
def price(cfg: RunConfig) -> dict:
    start = time.perf_counter()
    spec = validate(cfg.spec)
    method = Method(cfg.method)
    record: dict = {
        "preset": cfg.label,
        "style": spec.style.value,
        "method": method.value,
        "mode": cfg.mode.value if spec.style is ExerciseStyle.AMERICAN else "-",
        "m": cfg.m,
        "N": cfg.n_steps,
        "rate": spec.rate,
    }
    if method in (Method.PCA, Method.BOTH):
        record["pca"] = pca_price(spec, cfg.m, cfg.n_steps, cfg.mode, cfg.workers).value
    if method in (Method.COMONOTONIC, Method.BOTH):
        como = comonotonic_price(spec, cfg.m, cfg.n_steps, cfg.mode, cfg.workers)
        record.update(
            app=como.u_app,
            low=como.u_low,
            up=como.u_up,
            z=como.weights.z,
            lam_low=como.weights.lam_low,
            lam_up=como.weights.lam_up,
            nu=" ".join(f"{v:.6f}" for v in como.weights.nu),
        )

    bound = static_bound(spec)
    for col in method.columns:
        if record[col] < bound - STYLE_SLACK:
            logger.warning(f"{col} = {record[col]:.8f} sous la borne statique {bound:.8f}")
    record["seconds"] = time.perf_counter() - start
    return record


# ============================================================
# tables
# ============================================================
def tables(which: int, m: int, n_steps: int, workers: int | None = None, rate: float | None = None) -> pd.DataFrame:
    reference = reference_table(which)
    style = TABLE_STYLES[which]
    rows = []
    for preset_id in reference.index:
        spec = get_preset(preset_id, style)
        if rate is not None:
            spec = spec.with_rate(rate)
        logger.info(f"📊 Table {which} - preset {preset_id} ({style.value})")
        pca = pca_price(spec, m, n_steps, ConstraintMode.IT, workers).value
        como = comonotonic_price(spec, m, n_steps, ConstraintMode.IT, workers)
        rows.append({"preset": preset_id, "style": style.value, "pca": pca, "app": como.u_app, "low": como.u_low})

    computed = pd.DataFrame(rows).set_index("preset")
    monotone = strike_monotonicity(computed) if which in (3, 4) else None
    if rate is not None:
        logger.warning(f"taux forcé à {rate} : pas de comparaison aux valeurs de référence")
        if monotone is not None:
            computed["monotone_in_K"] = monotone
        return computed.reset_index()

    tols = pd.DataFrame([tolerances(p) for p in computed.index], index=computed.index, columns=["abs", "rel"])
    out = compare_to_reference(computed, reference, COLUMNS, tols["abs"], tols["rel"])
    if monotone is not None:
        out["monotone_in_K"] = monotone
    failed = int((~out["passed"]).sum())
    logger.info(f"{'✅' if failed == 0 else '❌'} Table {which} : {len(out) - failed}/{len(out)} ligne(s) dans la tolérance")
    return out.reset_index()


MONOTONE_COLUMNS = ("pca", "app", "low")


def strike_monotonicity(df: pd.DataFrame) -> pd.Series:
    """Par ligne : prix strictement croissants en K à (T, σ1) fixés, pour pca, app et low."""
    keys = pd.DataFrame([parse_hl_id(p) for p in df.index], index=df.index, columns=["T", "K", "s1"])
    flags = pd.Series(True, index=df.index, name="monotone_in_K")
    for (t, s1), group in keys.groupby(["T", "s1"]):
        index = group.sort_values("K").index
        for column in MONOTONE_COLUMNS:
            if np.any(np.diff(df.loc[index, column].to_numpy()) <= 0):
                logger.warning(f"❌ {column} non croissant en K pour T={t}, σ1={s1}")
                flags.loc[index] = False
    return flags


# ============================================================
# converge
# ============================================================
def _solve(method_col: str, spec: BasketSpec, m: int, n: int, mode: ConstraintMode, workers) -> float:
    if method_col == "pca":
        return pca_price(spec, m, n, mode, workers).value
    return comonotonic_price(spec, m, n, mode, workers).u_app


def converge(cfg: RunConfig, m_list, reference_m: int = REFERENCE_M) -> tuple[pd.DataFrame, dict]:
    """Erreur |v(m, N=m) - référence| et pente log-log par méthode."""
    spec = validate(cfg.spec)
    m_list = [int(m) for m in m_list]
    frame = pd.DataFrame({"m": m_list})
    slopes = {}
    for col in Method(cfg.method).columns:
        ref = reference_value(cfg.label, spec.style, col) if cfg.is_preset else None
        if ref is None:
            logger.info(f"référence {col} calculée à m = N = {reference_m}")
            ref = _solve(col, spec, reference_m, reference_m, cfg.mode, cfg.workers)
        values = [_solve(col, spec, m, m, cfg.mode, cfg.workers) for m in m_list]
        frame[f"value_{col}"] = values
        frame[f"error_{col}"] = abs_errors(values, ref)
        slopes[col] = fit_order(m_list, frame[f"error_{col}"])
        logger.info(f"📈 pente {col} : {slopes[col]:.3f}")
        expected = SPATIAL_ORDER_MIN[spec.style]
        if not slopes[col] >= expected:
            logger.warning(f"pente {col} = {slopes[col]:.3f} sous {expected} ({spec.style.value})")
    return frame, slopes


# ============================================================
# temporal_study
# ============================================================
def temporal_study(cfg: RunConfig, n_list, reference_n: int = REFERENCE_N) -> tuple[pd.DataFrame, dict]:
    """Erreur temporelle EP vs IT à m fixé ; référence IT à N = reference_n."""
    spec = validate(cfg.spec).with_style(ExerciseStyle.AMERICAN)
    n_list = [int(n) for n in n_list]
    frame = pd.DataFrame({"N": n_list})
    orders = {}
    for col in Method(cfg.method).columns:
        ref = _solve(col, spec, cfg.m, reference_n, ConstraintMode.IT, cfg.workers)
        for mode in (ConstraintMode.EP, ConstraintMode.IT):
            values = [_solve(col, spec, cfg.m, n, mode, cfg.workers) for n in n_list]
            key = f"{mode.value}_{col}"
            frame[key] = abs_errors(values, ref)
            orders[key] = fit_order(n_list, frame[key])
            logger.info(f"⏱️ ordre temporel {key} : {orders[key]:.3f}")
        ep, it = orders[f"ep_{col}"], orders[f"it_{col}"]
        if not EP_ORDER_BAND[0] <= ep <= EP_ORDER_BAND[1]:
            logger.warning(f"ordre EP {col} = {ep:.3f} hors de {EP_ORDER_BAND}")
        if not it >= IT_ORDER_MIN:
            logger.warning(f"ordre IT {col} = {it:.3f} sous {IT_ORDER_MIN}")
        if np.any(frame[f"it_{col}"] > frame[f"ep_{col}"]):
            logger.warning(f"erreur IT supérieure à EP pour au moins un N ({col})")
    return frame, orders


# ============================================================
# oracle_check
# ============================================================
def single_asset_view(spec: BasketSpec, style: ExerciseStyle) -> BasketSpec:
    """Put sur un seul actif : strike K, spot = ω·S₀, volatilité du premier actif."""
    return BasketSpec(
        strike=spec.strike,
        maturity=spec.maturity,
        rate=spec.rate,
        weights=[1.0],
        sigmas=[spec.sigmas[0]],
        corr=[[1.0]],
        spot=[float(spec.spot @ spec.weights)],
        style=style,
    )


def oracle_check(
    cfg: RunConfig,
    mc_paths: int,
    crr_steps: int = CRR_STEPS,
) -> pd.DataFrame:
    spec = validate(cfg.spec)
    rows = []
    scale = spec.strike

    d1 = spec if spec.d == 1 else single_asset_view(spec, ExerciseStyle.EUROPEAN)
    s, k, r, sigma, t = float(d1.spot[0]), d1.strike, d1.rate, float(d1.sigmas[0]), d1.maturity

    european = pca_price(d1.with_style(ExerciseStyle.EUROPEAN), cfg.m, cfg.n_steps, workers=cfg.workers).value
    rows.append(("d1_european_vs_closed_form", european, bs_put(s, k, r, sigma, t), D1_EUROPEAN_REL_TOL * scale))

    american = pca_price(d1.with_style(ExerciseStyle.AMERICAN), cfg.m, cfg.n_steps, cfg.mode, cfg.workers).value
    rows.append(("d1_american_vs_binomial", american, crr_american_put(s, k, r, sigma, t, crr_steps), D1_AMERICAN_REL_TOL * scale))

    if spec.d > 1:
        weights = comonotonic_weights(spec)
        lower = rank_one_spec(spec, weights.nu * spec.sigmas).with_style(ExerciseStyle.EUROPEAN)
        engine = pca_price(lower, cfg.m, cfg.n_steps, workers=cfg.workers).value
        mc = mc_european_basket(lower, mc_paths, cfg.seed, workers=cfg.workers)
        rows.append(("rank_one_lower_vs_monte_carlo", engine, mc.price, max(MC_STDERR_MULT * mc.stderr, MC_ABS_REL_TOL * scale)))

    df = pd.DataFrame(rows, columns=["check", "engine", "oracle", "tolerance"])
    df.insert(3, "deviation", (df["engine"] - df["oracle"]).abs())
    df["passed"] = df["deviation"] <= df["tolerance"]
    for row in df.itertuples():
        logger.info(f"{'✅' if row.passed else '❌'} {row.check} : écart {row.deviation:.2e} (tol {row.tolerance:.2e})")
    return df


# ============================================================
# spectrum
# ============================================================
def spectrum_report(spec: BasketSpec) -> pd.DataFrame:
    spectrum = eigendecompose(covariance(validate(spec)))
    return pd.DataFrame(
        {
            "k": np.arange(1, spectrum.d + 1),
            "eigenvalue": spectrum.eigenvalues,
            "column_class": [c.value if c is not None else "unclassified" for c in spectrum.column_classes],
        }
    )
