import warnings

import numpy as np
import pytest

from src.errors import AssumptionViolation, ConvergenceError
from src.market.basket import covariance
from src.market.presets import PRESET_IDS, get_preset
from src.market.spectral import ColumnClass, _off_diagonal_norm, classify_column, classify_columns, eigendecompose

SET_A_EIGENVALUES = (1.4089, 0.1124, 0.1006, 0.0388, 0.0213)
LEADING_EIGENVALUES = {
    "D": (0.4218, 0.0180, 0.0053),
    "E": (0.7897, 0.0647, 0.0187),
    "F": (1.1126, 0.1337, 0.0402),
    "HL-T1-K40-s0.3": (2.1398,),
    "HL-T1-K40-s0.9": (2.7299,),
}


def test_set_a_eigenvalues(set_a):
    spectrum = eigendecompose(covariance(set_a))
    np.testing.assert_allclose(spectrum.eigenvalues, SET_A_EIGENVALUES, atol=5e-5)


@pytest.mark.parametrize("preset_id, expected", LEADING_EIGENVALUES.items())
def test_leading_eigenvalues(preset_id, expected):
    spectrum = eigendecompose(covariance(get_preset(preset_id)))
    np.testing.assert_allclose(spectrum.eigenvalues[: len(expected)], expected, atol=5e-5)


@pytest.mark.parametrize("preset_id, lam1", [("B", 0.13), ("C", 0.18)])
def test_constant_correlation_spectrum(preset_id, lam1):
    spectrum = eigendecompose(covariance(get_preset(preset_id)))
    assert spectrum.eigenvalues[0] == pytest.approx(lam1, abs=1e-12)
    np.testing.assert_allclose(spectrum.eigenvalues[1:], 0.03, atol=1e-12)


@pytest.mark.parametrize("preset_id", PRESET_IDS)
def test_reconstruction_and_orthogonality(preset_id):
    sigma = covariance(get_preset(preset_id))
    spectrum = eigendecompose(sigma)
    q, lam = spectrum.eigenvectors, spectrum.eigenvalues
    scale = np.max(np.abs(sigma))
    assert np.max(np.abs(q @ np.diag(lam) @ q.T - sigma)) <= 1e-10 * scale
    assert np.max(np.abs(q.T @ q - np.eye(len(lam)))) <= 1e-12
    assert np.all(np.diff(lam) <= 0)
    assert lam[-1] >= 0


@pytest.mark.parametrize("preset_id", PRESET_IDS)
def test_presets_satisfy_column_assumption(preset_id):
    spectrum = eigendecompose(covariance(get_preset(preset_id)))
    classes = classify_columns(spectrum.eigenvectors)
    assert classes[0] is ColumnClass.ALL_POSITIVE
    assert all(c is ColumnClass.MIXED for c in classes[1:])


def test_decomposition_is_deterministic(set_a):
    first = eigendecompose(covariance(set_a))
    second = eigendecompose(covariance(set_a))
    assert np.array_equal(first.eigenvectors, second.eigenvectors)
    assert np.array_equal(first.eigenvalues, second.eigenvalues)


def test_largest_entry_of_each_column_is_positive(set_a):
    q = eigendecompose(covariance(set_a)).eigenvectors
    for k in range(q.shape[1]):
        assert q[np.argmax(np.abs(q[:, k])), k] > 0


def test_diagonal_matrix():
    spectrum = eigendecompose(np.diag([0.04, 0.09]))
    np.testing.assert_allclose(spectrum.eigenvalues, [0.09, 0.04])
    np.testing.assert_allclose(np.abs(spectrum.eigenvectors), [[0.0, 1.0], [1.0, 0.0]])


def test_identity_column_is_unclassifiable():
    spectrum = eigendecompose(np.diag([0.09, 0.04]))
    assert classify_column(spectrum.eigenvectors[:, 0]) is None
    with pytest.raises(AssumptionViolation):
        spectrum.column_class(0)
    with pytest.raises(AssumptionViolation):
        classify_columns(spectrum.eigenvectors)


def test_sweep_budget_exhaustion_raises(set_a):
    with pytest.raises(ConvergenceError):
        eigendecompose(covariance(set_a), max_sweeps=0)


def test_off_diagonal_norm_keeps_small_entries():
    a = np.array([[1.0, 1e-9, 0.0], [1e-9, 2.0, 0.0], [0.0, 0.0, 3.0]])
    assert _off_diagonal_norm(a) == pytest.approx(np.sqrt(2.0) * 1e-9, rel=1e-12)


@pytest.mark.parametrize("preset_id", ["F", "HL-T1-K40-s0.9"])
def test_slowly_decaying_spectra_converge(preset_id):
    sigma = covariance(get_preset(preset_id))
    spectrum = eigendecompose(sigma)
    q, lam = spectrum.eigenvectors, spectrum.eigenvalues
    assert np.max(np.abs(q @ np.diag(lam) @ q.T - sigma)) <= 1e-10 * np.max(np.abs(sigma))


@pytest.mark.parametrize("preset_id", ["B", "C"])
def test_degenerate_eigenvalues_are_tied_exactly(preset_id):
    lam = eigendecompose(covariance(get_preset(preset_id))).eigenvalues
    assert len(set(lam[1:].tolist())) == 1
    assert np.all(np.diff(lam) <= 0)


def test_subnormal_off_diagonal_does_not_overflow():
    sigma = np.array([[0.09, 0.01, 1e-310], [0.01, 0.04, 0.0], [1e-310, 0.0, 0.02]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        spectrum = eigendecompose(sigma)
    np.testing.assert_allclose(np.sort(spectrum.eigenvalues), np.linalg.eigvalsh(sigma), atol=1e-15)
