# ============================================================
# SRC/PDE/TRIDIAGONAL.PY
# ============================================================
"""Noyaux tridiagonaux : factorisation LU a priori (LAPACK gttrf/gttrs) et produit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from src.errors import SingularMatrixError


@dataclass(frozen=True)
class TridiagonalLU:
    n: int
    dl: np.ndarray
    d: np.ndarray
    du: np.ndarray
    du2: np.ndarray
    ipiv: np.ndarray


def lu_tridiagonal(lower, diag, upper) -> TridiagonalLU:
    """Factorise la matrice tridiagonale (lower[0] et upper[-1] ignorés)."""
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = diag.size

    if n == 1:
        if diag[0] == 0.0:
            raise SingularMatrixError("pivot nul en position 1")
        empty = np.zeros(0)
        return TridiagonalLU(1, empty, diag.copy(), empty, empty, np.ones(1, dtype=np.int32))

    dl, d, du, du2, ipiv, info = lapack.dgttrf(lower[1:], diag, upper[:-1])
    if info > 0:
        raise SingularMatrixError(f"pivot nul en position {info}")
    if info < 0:
        raise ValueError(f"argument {-info} invalide pour dgttrf")
    return TridiagonalLU(n, dl, d, du, du2, ipiv)


def solve(lu: TridiagonalLU, rhs, axis: int = 0) -> np.ndarray:
    """Résout M x = rhs le long de `axis` ; toutes les autres lignes en un seul appel."""
    rhs = np.asarray(rhs, dtype=float)
    moved = np.moveaxis(rhs, axis, 0)
    shape = moved.shape
    if lu.n == 1:
        return rhs / lu.d[0]

    b = np.asfortranarray(moved.reshape(lu.n, -1))
    x, info = lapack.dgttrs(lu.dl, lu.d, lu.du, lu.du2, lu.ipiv, b)
    if info != 0:
        raise ValueError(f"argument {-info} invalide pour dgttrs")
    return np.moveaxis(x.reshape(shape), 0, axis)


def tridiag_apply(lower, diag, upper, w, axis: int = 0) -> np.ndarray:
    """Produit M·w le long de `axis` sans matérialiser M."""
    w = np.moveaxis(np.asarray(w, dtype=float), axis, 0)
    tail = (1,) * (w.ndim - 1)
    lo = np.reshape(lower, (-1,) + tail)
    di = np.reshape(diag, (-1,) + tail)
    up = np.reshape(upper, (-1,) + tail)

    out = di * w
    out[1:] += lo[1:] * w[:-1]
    out[:-1] += up[:-1] * w[1:]
    return np.moveaxis(out, 0, axis)
