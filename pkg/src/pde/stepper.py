# ============================================================
# SRC/PDE/STEPPER.PY
# ============================================================
"""Intégration en temps : ADI de Douglas (θ = 1/2) en 2D, Crank–Nicolson en 1D,
démarrage de Rannacher et adaptations EP / IT pour le problème avec obstacle.

Convention 2D : W[i, j], i le long du premier axe actif, j le long du second.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from src.errors import DomainError
from src.pde.grid import AxisOperator
from src.pde.tridiagonal import TridiagonalLU, lu_tridiagonal, solve

logger = logging.getLogger(__name__)

THETA = 0.5


class TimeScheme(str, Enum):
    CN = "cn"
    DOUGLAS = "douglas"


class ConstraintMode(str, Enum):
    UNCONSTRAINED = "unconstrained"
    EP = "ep"
    IT = "it"


@dataclass
class SolveState:
    step: int
    w: np.ndarray
    mu: np.ndarray | None
    dt: float


@dataclass(frozen=True)
class AdiProblem:
    """Opérateurs (un par axe actif), W₀, horizon T et échantillonneur Ψ(t) optionnel."""

    operators: tuple[AxisOperator, ...]
    w0: np.ndarray
    maturity: float
    obstacle: Callable[[float], np.ndarray] | None = field(default=None, repr=False)

    @property
    def scheme(self) -> TimeScheme:
        return TimeScheme.CN if len(self.operators) == 1 else TimeScheme.DOUGLAS


@dataclass(frozen=True)
class SplitOperators:
    """Opérateurs et factorisations a priori de (I - θΔt A_k)."""

    operators: tuple[AxisOperator, ...]
    dt: float
    factors: tuple[TridiagonalLU, ...]

    @property
    def ndim(self) -> int:
        return len(self.operators)

    def _shape(self, k: int) -> tuple[int, ...]:
        shape = [1] * self.ndim
        shape[k] = -1
        return tuple(shape)

    def apply(self, k: int, w: np.ndarray) -> np.ndarray:
        return self.operators[k].apply(w, axis=k)

    def g(self, k: int, t: float) -> np.ndarray:
        return self.operators[k].g(t).reshape(self._shape(k))

    def g_total(self, t: float) -> np.ndarray:
        total = self.g(0, t)
        for k in range(1, self.ndim):
            total = total + self.g(k, t)
        return total

    def solve(self, k: int, rhs: np.ndarray) -> np.ndarray:
        return solve(self.factors[k], rhs, axis=k)


def split_operators(operators: Sequence[AxisOperator], dt: float) -> SplitOperators:
    if dt <= 0:
        raise DomainError(f"Δt doit être > 0, reçu {dt}")
    factors = tuple(
        lu_tridiagonal(-THETA * dt * op.lower, 1.0 - THETA * dt * op.diag, -THETA * dt * op.upper)
        for op in operators
    )
    logger.debug(f"factorisations LU : {len(factors)} axe(s), Δt={dt:.3e}")
    return SplitOperators(tuple(operators), dt, factors)


# ============================================================
# Pas élémentaires
# ============================================================
def douglas_step(w: np.ndarray, ops: SplitOperators, t_prev: float, mu: np.ndarray | None = None) -> np.ndarray:
    """Un pas de Douglas de t_prev à t_prev + Δt ; W̄ avant contrainte.

    Avec un seul axe, c'est exactement Crank–Nicolson.
    """
    dt = ops.dt
    t_new = t_prev + dt
    applied = [ops.apply(k, w) for k in range(ops.ndim)]

    y = w + dt * (sum(applied) + ops.g_total(t_prev))
    if mu is not None:
        y = y + dt * mu
    for k in range(ops.ndim):
        rhs = y - THETA * dt * applied[k] + THETA * dt * (ops.g(k, t_new) - ops.g(k, t_prev))
        y = ops.solve(k, rhs)
    return y


def _implicit_half_step(w: np.ndarray, ops: SplitOperators, t_new: float, mu: np.ndarray | None) -> np.ndarray:
    # Euler implicite factorisé de pas τ = Δt/2 : (I - τA_1)(I - τA_l) W = W + τ(g(t_new) [+ μ])
    tau = THETA * ops.dt
    rhs = w + tau * ops.g_total(t_new)
    if mu is not None:
        rhs = rhs + tau * mu
    for k in range(ops.ndim):
        rhs = ops.solve(k, rhs)
    return rhs


def _project_ep(w_bar: np.ndarray, psi_n: np.ndarray) -> np.ndarray:
    return np.maximum(w_bar, psi_n)


def _project_it(w_bar: np.ndarray, mu: np.ndarray, psi_n: np.ndarray, dt: float):
    w_hat = np.maximum(w_bar - dt * mu, psi_n)
    mu_new = np.maximum(0.0, mu + (psi_n - w_bar) / dt)
    return w_hat, mu_new


def ep_step(w: np.ndarray, ops: SplitOperators, t_prev: float, psi_n: np.ndarray) -> np.ndarray:
    return _project_ep(douglas_step(w, ops, t_prev), psi_n)


def it_step(w: np.ndarray, mu: np.ndarray, ops: SplitOperators, t_prev: float, psi_n: np.ndarray):
    w_bar = douglas_step(w, ops, t_prev, mu=mu)
    return _project_it(w_bar, mu, psi_n, ops.dt)


def rannacher_start(
    w0: np.ndarray,
    ops: SplitOperators,
    mode: ConstraintMode = ConstraintMode.UNCONSTRAINED,
    obstacle: Callable[[float], np.ndarray] | None = None,
    mu0: np.ndarray | None = None,
):
    """Premier pas remplacé par deux demi-pas d'Euler implicite ; renvoie (W₁, μ̂₁)."""
    mode = ConstraintMode(mode)
    if mode is not ConstraintMode.UNCONSTRAINED and obstacle is None:
        raise DomainError(f"le mode {mode.value} exige un obstacle")
    tau = THETA * ops.dt
    w = w0
    mu = None
    if mode is ConstraintMode.IT:
        mu = np.zeros_like(w0) if mu0 is None else mu0

    for half in (1, 2):
        t_new = half * tau
        if mode is ConstraintMode.IT:
            w_bar = _implicit_half_step(w, ops, t_new, mu)
            w, mu = _project_it(w_bar, mu, obstacle(t_new), tau)
        else:
            w = _implicit_half_step(w, ops, t_new, None)
            if mode is ConstraintMode.EP:
                w = _project_ep(w, obstacle(t_new))
    return w, mu


# ============================================================
# Boucle complète
# ============================================================
def integrate(
    problem: AdiProblem,
    n_steps: int,
    mode: ConstraintMode = ConstraintMode.UNCONSTRAINED,
    damping: bool = True,
    on_step: Callable[[SolveState], None] | None = None,
) -> SolveState:
    """Intègre de t=0 à t=T en N pas (premier pas amorti si `damping`)."""
    if n_steps < 1:
        raise DomainError(f"N doit être >= 1, reçu {n_steps}")
    mode = ConstraintMode(mode)
    if mode is not ConstraintMode.UNCONSTRAINED and problem.obstacle is None:
        raise DomainError(f"le mode {mode.value} exige un obstacle")

    dt = problem.maturity / n_steps
    ops = split_operators(problem.operators, dt)
    w = np.array(problem.w0, dtype=float)
    mu = np.zeros_like(w) if mode is ConstraintMode.IT else None

    first = 0
    if damping:
        w, mu = rannacher_start(w, ops, mode, problem.obstacle, mu)
        first = 1
        if on_step is not None:
            on_step(SolveState(1, w, mu, dt))

    for n in range(first, n_steps):
        t_prev = n * dt
        if mode is ConstraintMode.UNCONSTRAINED:
            w = douglas_step(w, ops, t_prev)
        elif mode is ConstraintMode.EP:
            w = ep_step(w, ops, t_prev, problem.obstacle((n + 1) * dt))
        else:
            w, mu = it_step(w, mu, ops, t_prev, problem.obstacle((n + 1) * dt))
        if on_step is not None:
            on_step(SolveState(n + 1, w, mu, dt))

    logger.debug(f"intégration {problem.scheme.value}/{mode.value} : N={n_steps}, forme {w.shape}")
    return SolveState(n_steps, w, mu, dt)
