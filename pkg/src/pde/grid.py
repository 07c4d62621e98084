# ============================================================
# SRC/PDE/GRID.PY
# ============================================================
"""Grilles non uniformes par axe, opérateurs tridiagonaux A_k, sources g_k(t),
vecteur initial moyenné autour du coude du payoff et vecteurs obstacles.

Coefficients de l'EDP transformée, pour chaque axe actif k :
    λ_k [ p(y) ∂²w/∂y² + q(y) ∂w/∂y ] - part·r·w
    p(η) = sin⁴(πη) / (2π²),   q(η) = sin³(πη) cos(πη) / π
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from src.errors import DomainError
from src.market.basket import BasketSpec, ExerciseStyle
from src.market.transform import (
    TransformContext,
    basket_gap_slice,
    boundary_value,
    x_of_y,
)
from src.pde.tridiagonal import tridiag_apply

logger = logging.getLogger(__name__)

# ── Paramètres de la grille ──────────────────────────────────
HALF_WIDTH = 0.15
MAX_MESH_RATIO = 1.5
STRETCH_GROWTH = 1.1
MAX_STRETCH_ITER = 200

# ── Moyennes de cellules ─────────────────────────────────────
KINK_XTOL = 1e-12
CELL_SAMPLES = 5
GAUSS_NODES = 8
MAX_BISECTIONS = 200


# ============================================================
# Grille par axe
# ============================================================
@dataclass(frozen=True)
class AxisGrid:
    """Noeuds intérieurs y_1 < … < y_m ; les faces y=0 et y=1 portent Dirichlet."""

    nodes: np.ndarray
    anchor_index: int
    stretch: float

    @property
    def m(self) -> int:
        return int(self.nodes.size)

    @property
    def anchor(self) -> float:
        return float(self.nodes[self.anchor_index])

    @property
    def full(self) -> np.ndarray:
        return np.concatenate(([0.0], self.nodes, [1.0]))

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.full)

    @property
    def dual_edges(self) -> np.ndarray:
        """Bords des cellules duales (milieu à milieu) ; cellule j = [e_j, e_{j+1}]."""
        full = self.full
        return 0.5 * (full[:-1] + full[1:])

    def mesh_ratio(self) -> float:
        h = self.spacing
        ratio = h[1:] / h[:-1]
        return float(max(np.max(ratio), np.max(1.0 / ratio)))


def _sinh_nodes(anchor: float, c: float, n_left: int, n: int) -> np.ndarray:
    # ξ uniforme par morceaux : n_left intervalles à gauche de l'ancre, n - n_left à droite
    xi_lo = math.asinh(-anchor / c)
    xi_hi = math.asinh((1.0 - anchor) / c)
    d_left = -xi_lo / n_left
    d_right = xi_hi / (n - n_left)
    j = np.arange(1, n)
    xi = np.where(j <= n_left, -d_left * (n_left - j), d_right * (j - n_left))
    return anchor + c * np.sinh(xi)


def build_axis_grid(
    m: int,
    anchor: float,
    half_width: float = HALF_WIDTH,
    max_ratio: float = MAX_MESH_RATIO,
) -> AxisGrid:
    """Grille y = a + c·sinh(ξ) concentrée autour de l'ancre a, noeud j* = a exactement.

    c part de `half_width` et grandit jusqu'à ce que le rapport de pas voisins
    reste dans [1/max_ratio, max_ratio].
    """
    if m < 3:
        raise DomainError(f"m doit être >= 3, reçu {m}")
    anchor = float(anchor)
    if not 0.0 < anchor < 1.0:
        raise DomainError(f"ancre hors de (0, 1) : {anchor!r}")

    n = m + 1
    c = half_width
    best: tuple[float, np.ndarray, int, float] | None = None
    for _ in range(MAX_STRETCH_ITER):
        xi_lo = math.asinh(-anchor / c)
        xi_hi = math.asinh((1.0 - anchor) / c)
        share = n * (-xi_lo) / (xi_hi - xi_lo)
        candidates = sorted({min(max(int(math.floor(share + 0.5)), 1), m),
                             min(max(int(math.floor(share)), 1), m),
                             min(max(int(math.ceil(share)), 1), m)})
        for n_left in candidates:
            nodes = _sinh_nodes(anchor, c, n_left, n)
            grid = AxisGrid(nodes=nodes, anchor_index=n_left - 1, stretch=c)
            ratio = grid.mesh_ratio()
            if best is None or ratio < best[0]:
                best = (ratio, nodes, n_left, c)
            if ratio <= max_ratio:
                logger.debug(f"grille m={m} ancre={anchor:.6f} c={c:.4f} ratio={ratio:.4f}")
                nodes.setflags(write=False)
                return grid
        c *= STRETCH_GROWTH

    ratio, nodes, n_left, c = best
    logger.warning(
        f"grille m={m} ancre={anchor:.6f} : rapport de pas {ratio:.3f} > {max_ratio}"
    )
    nodes.setflags(write=False)
    return AxisGrid(nodes=nodes, anchor_index=n_left - 1, stretch=c)


# ============================================================
# Différences finies
# ============================================================
def fd_coefficients(h_minus, h_plus) -> tuple[np.ndarray, np.ndarray]:
    """Poids centrés à 3 points (α pour ∂/∂y, β pour ∂²/∂y²), de forme (3, ...)."""
    hm = np.asarray(h_minus, dtype=float)
    hp = np.asarray(h_plus, dtype=float)
    s = hm + hp
    alpha = np.stack([-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s)])
    beta = np.stack([2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s)])
    return alpha, beta


def diffusion_profile(y):
    return np.sin(np.pi * y) ** 4 / (2.0 * np.pi**2)


def convection_profile(y):
    return np.sin(np.pi * y) ** 3 * np.cos(np.pi * y) / np.pi


BoundaryFn = Callable[[int, float], float]


@dataclass(frozen=True)
class AxisOperator:
    """A_k tridiagonal (m×m) et générateur de source g_k(t)."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    lower_face: float = 0.0
    upper_face: float = 0.0
    boundary: BoundaryFn | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return int(self.diag.size)

    def g(self, t: float) -> np.ndarray:
        out = np.zeros(self.m)
        if self.boundary is None:
            return out
        out[0] += self.lower_face * self.boundary(0, t)
        out[-1] += self.upper_face * self.boundary(1, t)
        return out

    def apply(self, w: np.ndarray, axis: int = 0) -> np.ndarray:
        return tridiag_apply(self.lower, self.diag, self.upper, w, axis)

    def to_sparse(self) -> sparse.csr_matrix:
        return sparse.diags(
            [self.lower[1:], self.diag, self.upper[:-1]], [-1, 0, 1], format="csr"
        )


def assemble_axis_operator(
    grid: AxisGrid,
    lam: float,
    reaction: float,
    ctx: TransformContext | None = None,
    style: ExerciseStyle = ExerciseStyle.EUROPEAN,
    axis: int = 0,
) -> AxisOperator:
    """Ligne j : λ[p(y_j) D² + q(y_j) D¹] - reaction ; poids de face vers g(t)."""
    if lam < 0:
        raise DomainError(f"λ doit être >= 0, reçu {lam}")
    y = grid.nodes
    h = grid.spacing
    alpha, beta = fd_coefficients(h[:-1], h[1:])
    diff = lam * diffusion_profile(y)
    conv = lam * convection_profile(y)

    lower = diff * beta[0] + conv * alpha[0]
    diag = diff * beta[1] + conv * alpha[1] - reaction
    upper = diff * beta[2] + conv * alpha[2]

    lower_face, upper_face = float(lower[0]), float(upper[-1])
    lower[0] = 0.0
    upper[-1] = 0.0

    boundary = None
    if ctx is not None:
        def boundary(side: int, t: float, _axis=axis) -> float:
            return boundary_value((_axis, side), t, ctx, style)

    for arr in (lower, diag, upper):
        arr.setflags(write=False)
    return AxisOperator(lower, diag, upper, lower_face, upper_face, boundary)


def plane_operators(op_1: AxisOperator, op_l: AxisOperator) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """(A₁ ⊗ I, I ⊗ A_l) sur W aplati en ordre C (W[i, j], i le long de l'axe 1)."""
    eye_1 = sparse.identity(op_1.m, format="csr")
    eye_l = sparse.identity(op_l.m, format="csr")
    return (
        sparse.kron(op_1.to_sparse(), eye_l, format="csr"),
        sparse.kron(eye_1, op_l.to_sparse(), format="csr"),
    )


# ============================================================
# Coupe active (axes variables, les autres fixés à l'ancre)
# ============================================================
@dataclass(frozen=True)
class PlaneSlice:
    axes: tuple[int, ...]
    grids: tuple[AxisGrid, ...]
    anchor: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(g.m for g in self.grids)


class ObstacleSampler:
    """ψ(·, t) aux noeuds, par factorisation séparable de Σ ω_i exp(z_i).

    exp(z_i) = exp(z_fixe_i + b_i(t)) · Π_a exp(Q[i, a] x_a) : un produit
    matriciel (m×d)·(d×m) par date au lieu de d exponentielles sur m² noeuds.
    """

    def __init__(self, plane: PlaneSlice, ctx: TransformContext, spec: BasketSpec, coords=None):
        q = ctx.spectrum.eigenvectors
        x_anchor = x_of_y(plane.anchor)
        inactive = [k for k in range(ctx.spectrum.d) if k not in plane.axes]
        self._ctx = ctx
        self._spec = spec
        self._z_fixed = q[:, inactive] @ x_anchor[inactive]
        coords = coords if coords is not None else [g.nodes for g in plane.grids]
        self._factors = [
            np.exp(np.clip(np.outer(x_of_y(c), q[:, axis]), -ctx.x_max, ctx.x_max))
            for axis, c in zip(plane.axes, coords)
        ]

    def gap(self, t: float) -> np.ndarray:
        """K - Σ ω_i s_i aux noeuds."""
        ctx, spec = self._ctx, self._spec
        z = np.clip(self._z_fixed + ctx.b(t), -ctx.x_max, ctx.x_max)
        coef = spec.weights * np.exp(z)
        if len(self._factors) == 1:
            basket = self._factors[0] @ coef
        else:
            basket = (self._factors[0] * coef) @ self._factors[1].T
        return spec.strike - spec.strike * basket

    def __call__(self, t: float) -> np.ndarray:
        return np.maximum(self.gap(t), 0.0)


def obstacle_vector(plane: PlaneSlice, t: float, ctx: TransformContext, spec: BasketSpec) -> np.ndarray:
    """Échantillons ponctuels de ψ(·, t) (pas de moyenne de cellule)."""
    return ObstacleSampler(plane, ctx, spec)(t)


# ============================================================
# Vecteur initial moyenné
# ============================================================
def bisect_roots(f: Callable[[np.ndarray], np.ndarray], lo, hi, xtol: float = KINK_XTOL) -> np.ndarray:
    """Bissection vectorisée ; f(lo) et f(hi) de signes opposés composante par composante."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    f_lo = f(lo)
    for _ in range(MAX_BISECTIONS):
        if np.max(hi - lo) <= xtol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        same = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(same, mid, lo)
        f_lo = np.where(same, f_mid, f_lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def split_cell_average(
    gap: Callable[[np.ndarray, np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    samples: int = CELL_SAMPLES,
    gauss_nodes: int = GAUSS_NODES,
) -> tuple[np.ndarray, np.ndarray]:
    """Moyenne de max(gap, 0) sur chaque cellule [a_r, b_r] (Gauss–Legendre coupé au coude).

    gap(y, rows) évalue la fonction sur la ligne `rows` (diffusable avec y).
    Retourne (moyennes, cellules traversées par un coude).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rows = np.arange(a.size)

    t = a[:, None] + (b - a)[:, None] * np.linspace(0.0, 1.0, samples)
    fs = gap(t, rows[:, None])
    flagged = np.any(fs > 0, axis=1) & np.any(fs < 0, axis=1)

    split = 0.5 * (t[:, :-1] + t[:, 1:])
    r_idx, c_idx = np.nonzero(fs[:, :-1] * fs[:, 1:] < 0)
    if r_idx.size:
        split[r_idx, c_idx] = bisect_roots(
            lambda y: gap(y, r_idx), t[r_idx, c_idx], t[r_idx, c_idx + 1]
        )

    seg_lo = np.stack([t[:, :-1], split], axis=-1).reshape(a.size, -1)
    seg_hi = np.stack([split, t[:, 1:]], axis=-1).reshape(a.size, -1)
    xg, wg = np.polynomial.legendre.leggauss(gauss_nodes)
    half = 0.5 * (seg_hi - seg_lo)
    centre = 0.5 * (seg_hi + seg_lo)
    pts = centre[..., None] + half[..., None] * xg
    vals = np.maximum(gap(pts, rows[:, None, None]), 0.0)
    integral = np.sum(half * (vals @ wg), axis=1)
    return integral / (b - a), flagged


def _kink_cells_2d(plane: PlaneSlice, ctx: TransformContext, spec: BasketSpec) -> np.ndarray:
    # signe de K - Σ ω_i s_i sur la grille raffinée (bords + noeuds) de chaque cellule
    refined = []
    for g in plane.grids:
        e = g.dual_edges
        pts = np.empty(2 * g.m + 1)
        pts[0::2] = e
        pts[1::2] = g.nodes
        refined.append(pts)
    values = ObstacleSampler(plane, ctx, spec, coords=refined).gap(0.0)
    pos = values > 0
    neg = values < 0
    m1, m2 = plane.shape
    any_pos = np.zeros((m1, m2), dtype=bool)
    any_neg = np.zeros((m1, m2), dtype=bool)
    for di in range(3):
        for dj in range(3):
            any_pos |= pos[di:di + 2 * m1:2, dj:dj + 2 * m2:2]
            any_neg |= neg[di:di + 2 * m1:2, dj:dj + 2 * m2:2]
    return any_pos & any_neg


def initial_vector(plane: PlaneSlice, ctx: TransformContext, spec: BasketSpec) -> np.ndarray:
    """W₀ : ψ(·, 0) aux noeuds, moyenne de cellule duale là où ψ a un coude."""
    w0 = ObstacleSampler(plane, ctx, spec)(0.0)
    anchor = plane.anchor

    if len(plane.axes) == 1:
        (axis,), (grid,) = plane.axes, plane.grids
        e = grid.dual_edges

        def gap_1d(y, rows):
            return basket_gap_slice((axis,), (y,), anchor, 0.0, ctx, spec)

        averages, flagged = split_cell_average(gap_1d, e[:-1], e[1:])
        logger.debug(f"vecteur initial 1D : {int(flagged.sum())} cellule(s) moyennée(s)")
        return np.where(flagged, averages, w0)

    # 2D : quadrature de Gauss extérieure selon l'axe l, moyenne coupée selon l'axe 1
    flagged = _kink_cells_2d(plane, ctx, spec)
    ii, jj = np.nonzero(flagged)
    if ii.size == 0:
        return w0
    grid_1, grid_l = plane.grids
    e1, el = grid_1.dual_edges, grid_l.dual_edges
    xg, wg = np.polynomial.legendre.leggauss(GAUSS_NODES)

    panels = [(el[jj], grid_l.nodes[jj]), (grid_l.nodes[jj], el[jj + 1])]
    outer_pts, outer_w = [], []
    for lo, hi in panels:
        half = 0.5 * (hi - lo)
        outer_pts.append(0.5 * (hi + lo)[:, None] + half[:, None] * xg)
        outer_w.append(half[:, None] * wg)
    yl = np.concatenate(outer_pts, axis=1)
    wl = np.concatenate(outer_w, axis=1)
    n_outer = yl.shape[1]

    yl_rows = yl.ravel()
    a1 = np.repeat(e1[ii], n_outer)
    b1 = np.repeat(e1[ii + 1], n_outer)
    axes = plane.axes

    def gap_2d(y, rows):
        return basket_gap_slice(axes, (y, yl_rows[rows]), anchor, 0.0, ctx, spec)

    inner, _ = split_cell_average(gap_2d, a1, b1)
    averages = np.sum(inner.reshape(ii.size, n_outer) * wl, axis=1) / (el[jj + 1] - el[jj])
    logger.debug(f"vecteur initial 2D : {ii.size} cellule(s) moyennée(s)")
    w0 = w0.copy()
    w0[ii, jj] = averages
    return w0


def make_plane(axes: Sequence[int], grids: Sequence[AxisGrid], anchor) -> PlaneSlice:
    anchor = np.array(anchor, dtype=float)
    anchor.setflags(write=False)
    return PlaneSlice(axes=tuple(axes), grids=tuple(grids), anchor=anchor)
