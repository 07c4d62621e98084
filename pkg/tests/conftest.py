import numpy as np
import pytest

from src.market.basket import BasketSpec, ExerciseStyle
from src.market.presets import get_preset
from src.market.spectral import eigendecompose
from src.market.basket import covariance
from src.market.transform import make_context


def single_asset(strike=100.0, spot=100.0, rate=0.05, sigma=0.2, maturity=1.0, style=ExerciseStyle.EUROPEAN):
    return BasketSpec(
        strike=strike,
        maturity=maturity,
        rate=rate,
        weights=[1.0],
        sigmas=[sigma],
        corr=[[1.0]],
        spot=[spot],
        style=style,
    )


@pytest.fixture
def set_a():
    return get_preset("A")


@pytest.fixture
def two_assets():
    return BasketSpec(
        strike=100.0,
        maturity=1.0,
        rate=0.04,
        weights=[0.6, 0.4],
        sigmas=[0.3, 0.2],
        corr=[[1.0, 0.5], [0.5, 1.0]],
        spot=[100.0, 100.0],
    )


@pytest.fixture
def set_a_context(set_a):
    spectrum = eigendecompose(covariance(set_a))
    return make_context(set_a, spectrum)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
