import numpy as np
import pytest

from src.errors import DomainError
from src.market.basket import ExerciseStyle, validate
from src.market.presets import HL_IDS, PRESET_IDS, get_preset, hl_preset_id, parse_hl_id


def test_registry_size():
    assert len(HL_IDS) == 18
    assert len(PRESET_IDS) == 24


@pytest.mark.parametrize("preset_id", PRESET_IDS)
def test_every_preset_validates(preset_id):
    spec = validate(get_preset(preset_id, style=ExerciseStyle.AMERICAN))
    assert spec.style is ExerciseStyle.AMERICAN


@pytest.mark.parametrize("preset_id, d, strike", [("A", 5, 1.0), ("B", 10, 40.0), ("C", 15, 40.0), ("D", 5, 100.0), ("E", 10, 100.0), ("F", 15, 100.0)])
def test_sets_are_at_the_money(preset_id, d, strike):
    spec = get_preset(preset_id)
    assert spec.d == d
    assert spec.strike == strike
    np.testing.assert_array_equal(spec.spot, strike)


def test_decaying_correlation():
    corr = get_preset("D").corr
    assert corr[0, 2] == pytest.approx(np.exp(-2 * 0.0413))


def test_hl_id_round_trip():
    assert hl_preset_id(0.5, 35, 0.3) == "HL-T0.5-K35-s0.3"
    assert parse_hl_id("HL-T2-K45-s0.9") == (2.0, 45.0, 0.9)
    spec = get_preset("HL-T2-K45-s0.9")
    assert spec.sigmas[0] == 0.9 and spec.maturity == 2.0 and spec.strike == 45.0
    np.testing.assert_array_equal(spec.spot, 40.0)


@pytest.mark.parametrize("bad", ["G", "HL-T3-K40-s0.3", "HL-T1-K40", ""])
def test_unknown_presets(bad):
    with pytest.raises(DomainError):
        get_preset(bad)
