import math
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from src.bench import runners
from src.bench.reference_values import reference_table
from src.market.basket import ExerciseStyle
from src.market.presets import HL_STRIKES, get_preset, hl_preset_id
from src.pde.stepper import ConstraintMode
from tests.conftest import single_asset


def _config(spec, label="test", **kwargs):
    return runners.RunConfig(spec=spec, label=label, is_preset=False, workers=1, **kwargs)


def test_static_bound():
    assert runners.static_bound(single_asset(spot=90.0)) == pytest.approx(100.0 * math.exp(-0.05) - 90.0)
    assert runners.static_bound(single_asset(spot=90.0, style=ExerciseStyle.AMERICAN)) == pytest.approx(10.0)
    assert runners.static_bound(single_asset(spot=120.0)) == 0.0


def test_method_columns():
    assert runners.Method("both").columns == ("pca", "app")
    assert runners.Method.COMONOTONIC.columns == ("app",)


def test_price_record(two_assets):
    record = runners.price(_config(two_assets, m=20, n_steps=20))
    for key in ("pca", "app", "low", "up", "z", "lam_low", "lam_up", "nu", "seconds"):
        assert key in record
    assert record["mode"] == "-"
    assert record["low"] <= record["app"] <= record["up"]


def test_price_pca_only(two_assets):
    record = runners.price(_config(two_assets, method=runners.Method.PCA, m=20, n_steps=20))
    assert "pca" in record and "app" not in record


def test_spectrum_report(set_a):
    df = runners.spectrum_report(set_a)
    assert list(df.columns) == ["k", "eigenvalue", "column_class"]
    assert list(df["k"]) == [1, 2, 3, 4, 5]
    assert np.all(np.diff(df["eigenvalue"]) <= 0)
    assert df.loc[0, "column_class"] == "all_positive"


def test_converge_single_asset():
    df, slopes = runners.converge(_config(single_asset(), method=runners.Method.PCA), [20, 40, 80], reference_m=160)
    assert list(df.columns) == ["m", "value_pca", "error_pca"]
    assert (df["error_pca"] >= 0).all()
    assert np.isfinite(slopes["pca"]) and slopes["pca"] > 0.5


def test_temporal_study_columns():
    cfg = _config(single_asset(), method=runners.Method.PCA, m=40)
    df, orders = runners.temporal_study(cfg, [10, 20, 40], reference_n=160)
    assert list(df.columns) == ["N", "ep_pca", "it_pca"]
    assert set(orders) == {"ep_pca", "it_pca"}


def test_oracle_check_rows(two_assets):
    df = runners.oracle_check(_config(two_assets, m=40, n_steps=40), mc_paths=20_000, crr_steps=200)
    assert list(df["check"]) == [
        "d1_european_vs_closed_form",
        "d1_american_vs_binomial",
        "rank_one_lower_vs_monte_carlo",
    ]
    assert list(df.columns) == ["check", "engine", "oracle", "deviation", "tolerance", "passed"]
    assert (df["deviation"] == (df["engine"] - df["oracle"]).abs()).all()


def test_oracle_check_single_asset_skips_monte_carlo():
    df = runners.oracle_check(_config(single_asset(), m=40, n_steps=40), mc_paths=1000, crr_steps=200)
    assert len(df) == 2


def test_tables_compare_against_reference(monkeypatch):
    reference = reference_table(1)
    # moteur remplacé par les valeurs publiées, sauf C décalé hors tolérance
    def fake_pca(spec, m, n, mode, workers):
        preset = _preset_of(spec)
        shift = 0.1 if preset == "C" else 0.0
        return SimpleNamespace(value=reference.loc[preset, "pca"] + shift)

    def fake_como(spec, m, n, mode, workers):
        preset = _preset_of(spec)
        return SimpleNamespace(u_app=reference.loc[preset, "app"], u_low=reference.loc[preset, "low"])

    monkeypatch.setattr(runners, "pca_price", fake_pca)
    monkeypatch.setattr(runners, "comonotonic_price", fake_como)

    df = runners.tables(1, m=10, n_steps=10)
    assert list(df["preset"]) == ["A", "B", "C", "D", "E", "F"]
    assert list(df["passed"]) == [True, True, False, True, True, True]
    assert "dev_pca" in df and "tol_low" in df


def test_tables_with_rate_override_skip_comparison(monkeypatch):
    monkeypatch.setattr(runners, "pca_price", lambda *a: SimpleNamespace(value=1.0))
    monkeypatch.setattr(runners, "comonotonic_price", lambda *a: SimpleNamespace(u_app=1.0, u_low=1.0))
    df = runners.tables(2, m=10, n_steps=10, rate=0.0)
    assert "passed" not in df
    assert (df["style"] == "american").all()


def _preset_of(spec):
    for preset in ("A", "B", "C", "D", "E", "F"):
        candidate = get_preset(preset, spec.style)
        if candidate.d == spec.d and candidate.strike == spec.strike and np.array_equal(candidate.corr, spec.corr):
            return preset
    raise AssertionError("preset introuvable")


def test_single_asset_view(two_assets):
    view = runners.single_asset_view(two_assets, ExerciseStyle.AMERICAN)
    assert view.d == 1
    assert view.spot[0] == pytest.approx(100.0)
    assert view.sigmas[0] == 0.3
    assert view.style is ExerciseStyle.AMERICAN
    assert runners.RunConfig(spec=view, label="x").mode is ConstraintMode.IT


@pytest.mark.parametrize("preset_id, lam_1", [("HL-T1-K40-s0.3", 2.1398), ("HL-T1-K40-s0.9", 2.7299)])
def test_hl_leading_eigenvalue(preset_id, lam_1):
    df = runners.spectrum_report(get_preset(preset_id))
    assert len(df) == 8
    assert df.loc[0, "eigenvalue"] == pytest.approx(lam_1, abs=1e-4)


def _patch_engines_with_reference(monkeypatch, reference, overrides=None):
    overrides = overrides or {}
    monkeypatch.setattr(runners, "get_preset", lambda preset_id, style: preset_id)
    monkeypatch.setattr(
        runners, "pca_price", lambda spec, m, n, mode, workers: SimpleNamespace(value=reference.loc[spec, "pca"])
    )

    def fake_como(spec, m, n, mode, workers):
        app = overrides.get(spec, reference.loc[spec, "app"])
        return SimpleNamespace(u_app=app, u_low=reference.loc[spec, "low"])

    monkeypatch.setattr(runners, "comonotonic_price", fake_como)


@pytest.mark.parametrize("which", [3, 4])
def test_tables_records_strike_monotonicity(monkeypatch, which):
    _patch_engines_with_reference(monkeypatch, reference_table(which))
    df = runners.tables(which, m=10, n_steps=10)
    assert df["monotone_in_K"].all()
    assert df["passed"].all()


def test_tables_flags_non_monotone_group(monkeypatch):
    reference = reference_table(3)
    broken = hl_preset_id(1.0, 40.0, 0.9)
    _patch_engines_with_reference(monkeypatch, reference, {broken: 0.0})
    df = runners.tables(3, m=10, n_steps=10).set_index("preset")
    group = [hl_preset_id(1.0, k, 0.9) for k in HL_STRIKES]
    assert not df.loc[group, "monotone_in_K"].any()
    assert df.drop(index=group)["monotone_in_K"].all()


def test_tables_monotonicity_kept_with_rate_override(monkeypatch):
    _patch_engines_with_reference(monkeypatch, reference_table(4))
    monkeypatch.setattr(runners, "get_preset", lambda preset_id, style: SimpleNamespace(with_rate=lambda r: preset_id))
    df = runners.tables(4, m=10, n_steps=10, rate=0.0)
    assert "passed" not in df
    assert df["monotone_in_K"].all()


def test_tables_sets_have_no_monotonicity_column(monkeypatch):
    _patch_engines_with_reference(monkeypatch, reference_table(2))
    assert "monotone_in_K" not in runners.tables(2, m=10, n_steps=10)


def test_strike_monotonicity_checks_every_engine_column():
    ids = [hl_preset_id(0.5, k, 0.3) for k in HL_STRIKES]
    df = pd.DataFrame({"pca": [1.0, 2.0, 3.0], "app": [1.0, 2.0, 3.0], "low": [1.0, 2.0, 2.0]}, index=ids)
    assert not runners.strike_monotonicity(df).any()
    df["low"] = [1.0, 2.0, 3.0]
    assert runners.strike_monotonicity(df).all()
