import numpy as np
import pandas as pd

DROP_RATIO = 1e-2


def abs_errors(values, reference: float) -> np.ndarray:
    return np.abs(np.asarray(values, dtype=float) - reference)


def drop_points(errors, ratio: float = DROP_RATIO) -> np.ndarray:
    """
    Repère les chutes ponctuelles d'erreur (changement de signe de l'erreur) :
    un point est exclu s'il est nul ou inférieur à ratio × chacun de ses voisins.
    """
    errors = np.asarray(errors, dtype=float)
    mask = errors <= 0.0
    for i in range(errors.size):
        neighbours = [errors[j] for j in (i - 1, i + 1) if 0 <= j < errors.size]
        if neighbours and all(errors[i] < ratio * e for e in neighbours):
            mask[i] = True
    return mask


def fit_order(sizes, errors, exclude_drops: bool = True) -> float:
    """
    Pente des moindres carrés de log(erreur) en fonction de log(1/taille).

    Une erreur c/m² donne une pente de 2. Renvoie NaN s'il reste moins de
    deux points exploitables.
    """
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = ~drop_points(errors) if exclude_drops else errors > 0
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(1.0 / sizes[keep]), np.log(errors[keep]), 1)
    return float(slope)


def compare_to_reference(
    computed: pd.DataFrame,
    reference: pd.DataFrame,
    columns,
    abs_tol: pd.Series,
    rel_tol: pd.Series,
) -> pd.DataFrame:
    """
    Ajoute, pour chaque colonne, la référence, l'écart absolu et le verdict.
    `computed` et `reference` partagent le même index (identifiant du preset).
    """
    out = computed.copy()
    passed = pd.Series(True, index=out.index)
    for col in columns:
        ref = reference[col].reindex(out.index)
        dev = (out[col] - ref).abs()
        tol = np.maximum(abs_tol, rel_tol * ref.abs())
        out[f"ref_{col}"] = ref
        out[f"dev_{col}"] = dev
        passed &= dev <= tol
        out[f"tol_{col}"] = tol
    out["passed"] = passed
    return out
