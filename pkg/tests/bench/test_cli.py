import pandas as pd
import pytest

import main_basket_cli as cli
from src.bench import runners


@pytest.fixture(autouse=True)
def no_tracking(monkeypatch, tmp_path):
    monkeypatch.delenv("MLFLOW_TRACKING_URI", raising=False)
    monkeypatch.setenv("BASKET_OUTPUT_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("BASKET_WORKERS", "1")


def test_parse_int_list():
    assert cli.parse_int_list("20,30,40") == [20, 30, 40]
    assert cli.parse_int_list("20:60:20") == [20, 40, 60]
    assert cli.parse_int_list("3:5") == [3, 4, 5]


def test_spectrum_writes_csv(tmp_path):
    out = tmp_path / "spectrum.csv"
    assert cli.main(["spectrum", "--preset", "A", "--out", str(out)]) == cli.EXIT_OK
    df = pd.read_csv(out)
    assert len(df) == 5


def test_spectrum_default_output(tmp_path):
    assert cli.main(["spectrum", "--preset", "HL-T1-K40-s0.3"]) == cli.EXIT_OK
    assert (tmp_path / "reports" / "spectrum_HL-T1-K40-s0.3.csv").exists()


def test_price_from_config(tmp_path, capsys):
    config = tmp_path / "basket.cfg"
    config.write_text(
        "d = 2\nstrike = 100\nmaturity = 1\nrate = 0.04\nstyle = american\n"
        "weights = 0.6, 0.4\nsigmas = 0.3, 0.2\nspot = 100\ncorr.all = 0.5\n"
    )
    code = cli.main(["price", "--config", str(config), "--m", "12", "--n", "12", "--out", str(tmp_path / "p.csv")])
    assert code == cli.EXIT_OK
    assert "pca" in capsys.readouterr().out
    record = pd.read_csv(tmp_path / "p.csv")
    assert record.loc[0, "style"] == "american"


@pytest.mark.parametrize(
    "argv",
    [
        ["price", "--preset", "Z"],
        ["price", "--preset", "A", "--m", "2"],
        ["price", "--preset", "A", "--rate", "-0.1"],
    ],
)
def test_invalid_input_exit_code(argv):
    assert cli.main(argv) == cli.EXIT_INVALID


def test_bad_config_exit_code(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("d = 2\nstrike = 100\n")
    assert cli.main(["price", "--config", str(config)]) == cli.EXIT_INVALID


def test_argparse_errors_exit_with_two():
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["tables", "--which", "7"])
    assert excinfo.value.code == 2


def test_oracle_failure_exit_code(monkeypatch, tmp_path):
    failing = pd.DataFrame(
        {"check": ["d1_european_vs_closed_form"], "engine": [1.0], "oracle": [2.0], "deviation": [1.0], "tolerance": [0.1], "passed": [False]}
    )
    monkeypatch.setattr(runners, "oracle_check", lambda cfg, paths, steps: failing)
    code = cli.main(["oracle-check", "--preset", "A", "--out", str(tmp_path / "o.csv")])
    assert code == cli.EXIT_TOLERANCE


def test_tables_check_flag(monkeypatch, tmp_path):
    result = pd.DataFrame({"preset": ["A"], "pca": [0.0], "passed": [False]})
    monkeypatch.setattr(runners, "tables", lambda *args: result)
    out = str(tmp_path / "t.csv")
    assert cli.main(["tables", "--which", "1", "--out", out]) == cli.EXIT_OK
    assert cli.main(["tables", "--which", "1", "--check", "--out", out]) == cli.EXIT_TOLERANCE


def test_tables_check_fails_on_strike_monotonicity(monkeypatch, tmp_path):
    result = pd.DataFrame({"preset": ["HL-T1-K40-s0.3"], "pca": [1.0], "passed": [True], "monotone_in_K": [False]})
    monkeypatch.setattr(runners, "tables", lambda *args: result)
    out = str(tmp_path / "t.csv")
    assert cli.main(["tables", "--which", "3", "--out", out]) == cli.EXIT_OK
    assert cli.main(["tables", "--which", "3", "--check", "--out", out]) == cli.EXIT_TOLERANCE
