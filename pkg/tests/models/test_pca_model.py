import math

import numpy as np
import pytest

from src.bench.runners import static_bound
from src.errors import DomainError
from src.market.basket import ExerciseStyle, covariance
from src.market.presets import PRESET_IDS, get_preset
from src.market.spectral import ColumnClass, eigendecompose
from src.models.oracles import bs_put, crr_american_put, mc_european_basket
from src.models.pca_model import pca_price
from src.models.subproblem import constraint_mode, make_subproblem
from src.pde.stepper import ConstraintMode
from tests.conftest import single_asset


# ── Sous-problèmes ───────────────────────────────────────────
def test_constraint_mode():
    assert constraint_mode(ExerciseStyle.EUROPEAN, ConstraintMode.IT) is ConstraintMode.UNCONSTRAINED
    assert constraint_mode(ExerciseStyle.AMERICAN, "ep") is ConstraintMode.EP
    with pytest.raises(DomainError):
        constraint_mode(ExerciseStyle.AMERICAN, ConstraintMode.UNCONSTRAINED)


def test_make_subproblem(set_a):
    spectrum = eigendecompose(covariance(set_a))
    sub = make_subproblem(spectrum, np.full(5, 0.5), (0, 3), set_a.style)
    assert sub.label == "w(1,4)"
    assert sub.lams == (spectrum.eigenvalues[0], spectrum.eigenvalues[3])
    assert sub.classes[0] is ColumnClass.ALL_POSITIVE


@pytest.mark.parametrize("axes", [(1,), (0, 0), (0, 1, 2)])
def test_invalid_subproblem_axes(set_a, axes):
    spectrum = eigendecompose(covariance(set_a))
    with pytest.raises(DomainError):
        make_subproblem(spectrum, np.full(5, 0.5), axes, set_a.style)


# ── d = 1 contre les oracles ─────────────────────────────────
def test_single_asset_european_matches_closed_form():
    result = pca_price(single_asset(), 120, 120, workers=1)
    assert result.corrections == ()
    assert result.value == result.base
    assert result.value == pytest.approx(bs_put(100.0, 100.0, 0.05, 0.2, 1.0), abs=2e-2)


@pytest.mark.parametrize("mode", [ConstraintMode.EP, ConstraintMode.IT])
def test_single_asset_american_matches_binomial(mode):
    spec = single_asset(style=ExerciseStyle.AMERICAN)
    value = pca_price(spec, 120, 120, mode, workers=1).value
    assert value == pytest.approx(crr_american_put(100.0, 100.0, 0.05, 0.2, 1.0, 2000), abs=3e-2)


def test_deep_in_the_money_american_respects_payoff():
    spec = single_asset(strike=100.0, spot=70.0, style=ExerciseStyle.AMERICAN)
    assert pca_price(spec, 80, 80, workers=1).value >= 30.0 - 1e-8


# ── d > 1 ────────────────────────────────────────────────────
def test_decomposition_is_consistent(set_a):
    result = pca_price(set_a, 20, 20, workers=2)
    assert [l for l, _ in result.corrections] == [1, 2, 3, 4]
    assert result.value == pytest.approx(result.base + sum(delta for _, delta in result.corrections), abs=1e-14)
    assert result.spectrum.d == 5


def test_workers_do_not_change_the_result(set_a):
    sequential = pca_price(set_a, 16, 16, workers=1).value
    parallel = pca_price(set_a, 16, 16, workers=4).value
    assert sequential == parallel


def test_two_assets_is_the_full_problem(two_assets):
    # d = 2 : ũ se réduit au seul problème (1, 2), sans approximation
    value = pca_price(two_assets, 60, 60, workers=1).value
    mc = mc_european_basket(two_assets, 200_000, seed=5)
    assert abs(value - mc.price) <= max(4 * mc.stderr, 5e-2)


def test_american_dominates_european(two_assets):
    european = pca_price(two_assets, 30, 30, workers=1).value
    american = pca_price(two_assets.with_style(ExerciseStyle.AMERICAN), 30, 30, workers=1).value
    assert american >= european - 1e-8
    assert european >= max(100.0 * math.exp(-0.04) - 100.0, 0.0)


# ── Tous les presets, discrétisation grossière ───────────────
COARSE = 20


@pytest.mark.parametrize("preset_id", PRESET_IDS)
def test_presets_style_ordering_and_static_bounds(preset_id):
    european_spec = get_preset(preset_id, ExerciseStyle.EUROPEAN)
    american_spec = get_preset(preset_id, ExerciseStyle.AMERICAN)
    european = pca_price(european_spec, COARSE, COARSE).value
    american = pca_price(american_spec, COARSE, COARSE).value
    assert american >= european - 1e-8
    assert european >= static_bound(european_spec) - 1e-8
    assert american >= static_bound(american_spec) - 1e-8
