import json
import sys

import pytest

from kg_currents.app import bootstrap as bootstrap_module
from kg_currents.app.mode import ExperimentConfig, build_config, build_parser
from kg_currents.app.runner import run
from kg_currents.core.errors import UsageError
from kg_currents.storage import config_manager
from kg_currents.storage.config_manager import AppSettingsManager
from kg_currents.storage.models import AppSettings, DefaultSettings


@pytest.fixture(autouse=True)
def isolated_data(tmp_path, monkeypatch):
    monkeypatch.setattr(config_manager, "_settings_manager", AppSettingsManager(tmp_path / "settings.toml"))
    monkeypatch.setattr(bootstrap_module, "LOGS_DIR", tmp_path / "Logs")
    monkeypatch.setattr(bootstrap_module, "ensure_data_dirs", lambda: None)
    monkeypatch.setattr(sys, "excepthook", sys.excepthook)
    return tmp_path


def test_continuity_writes_a_passing_report(tmp_path):
    out = tmp_path / "continuity.csv"
    assert run(["continuity", "--out", str(out), "--log-level", "WARNING"]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "schema=1"
    assert lines[1].startswith("experiment,a,kappa")
    assert any("continuity_residual_J" in line for line in lines[2:])
    assert list((tmp_path / "Logs").glob("log_*.log"))


def test_json_format(tmp_path):
    out = tmp_path / "continuity.json"
    assert run(["continuity", "--out", str(out), "--format", "json", "--a", "0.4"]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["schema"] == 1
    assert doc["passed"] is True
    assert all(row["a"] == 0.4 for row in doc["rows"])


def test_same_seed_gives_identical_reports(tmp_path):
    first, second = tmp_path / "1.csv", tmp_path / "2.csv"
    codes = {run(["inner-products", "--seed", "11", "--out", str(out)]) for out in (first, second)}
    assert len(codes) == 1
    assert first.read_bytes() == second.read_bytes()


def test_unknown_experiment_is_a_usage_error(capsys):
    assert run(["teleport"]) == 2
    assert "invalid choice" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["continuity", "--a", "1.5"],
        ["continuity", "--beta", "1.2"],
        ["continuity", "--lattice", "4,16,8.0"],
        ["nonrel-limit", "--scales", "4"],
        ["continuity", "--tolerance-scale", "0"],
    ],
)
def test_invalid_parameters_are_usage_errors(tmp_path, argv, capsys):
    assert run([*argv, "--out", str(tmp_path / "x.csv")]) == 2
    assert "error:" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_malformed_input_document(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run(["continuity", "--in", str(bad), "--out", str(tmp_path / "x.csv")]) == 3


def test_input_document_is_used(tmp_path):
    doc = tmp_path / "field.json"
    doc.write_text(
        json.dumps({"mass": 1.0, "box_length": 16.0, "modes": [{"re": 1.0, "k": [0.39269908169872414, 0.0, 0.0]}]}),
        encoding="utf-8",
    )
    out = tmp_path / "x.csv"
    assert run(["continuity", "--in", str(doc), "--out", str(out)]) == 0
    assert "1,64,16" in out.read_text(encoding="utf-8")


def test_settings_defaults_feed_the_config(tmp_path):
    settings = AppSettings(Defaults=DefaultSettings(a=0.25, seed=9, lattice="2,16,8.0"))
    args = build_parser().parse_args(["gauge-orbit"])
    cfg = build_config(args, settings)
    assert (cfg.a, cfg.seed, cfg.lattice.dims) == (0.25, 9, 2)
    assert not cfg.kappa_given
    cfg = build_config(build_parser().parse_args(["gauge-orbit", "--a", "-0.5", "--kappa", "2"]), settings)
    assert (cfg.a, cfg.kappa, cfg.kappa_given) == (-0.5, 2.0, True)


def test_config_validation():
    with pytest.raises(UsageError, match="lattice"):
        build_config(build_parser().parse_args(["continuity", "--lattice", "1,4,8.0"]), AppSettings())
    cfg = ExperimentConfig(experiment="covariance", beta=(0.1, 0.2, 0.0), tolerance_scale=10.0)
    assert cfg.tolerance(1e-12) == pytest.approx(1e-11)
    assert cfg.boost.velocity == (0.1, 0.2, 0.0)


def test_kg_normalization_scales_the_charge(tmp_path):
    charges = {}
    for label, extra in (("default", []), ("scaled", ["--g", "5"])):
        out = tmp_path / f"{label}.json"
        assert run(["total-probability", "--out", str(out), "--format", "json", *extra]) == 0
        rows = json.loads(out.read_text(encoding="utf-8"))["rows"]
        charges[label] = {row["quantity"]: row for row in rows if row["quantity"].startswith("charge_Q[")}
    assert charges["default"]
    for quantity, row in charges["scaled"].items():
        assert row["g"] == 5.0
        assert charges["default"][quantity]["g"] == 0.5
        assert row["value_re"] == pytest.approx(10.0 * charges["default"][quantity]["value_re"], rel=1e-12)
