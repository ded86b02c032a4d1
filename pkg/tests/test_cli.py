import json

import numpy as np
import pytest

from lambda2p.cli import (
    FIG2_PANELS,
    RunConfig,
    SweepAxis,
    build_parser,
    main,
)
from lambda2p.errors import ConfigError


def run_cli(*argv):
    return main(list(argv))


def test_parser_subcommands():
    ap = build_parser()
    args = ap.parse_args(["fig2", "--panel", "C", "--count", "5"])
    assert args.mode == "fig2" and args.panel == "C"
    args = ap.parse_args(["point", "--gamma-a", "2", "--delta2", "0.3"])
    assert args.gamma_a == 2.0 and args.delta2 == 0.3


def test_sweep_axis_validation():
    SweepAxis("delta2", "log", 1e-3, 1e2, 5)
    with pytest.raises(ConfigError):
        SweepAxis("delta3", "log", 0.1, 1.0, 5)
    with pytest.raises(ConfigError):
        SweepAxis("delta2", "log", 0.0, 1.0, 5)  # log needs min > 0
    with pytest.raises(ConfigError):
        SweepAxis("delta2", "linear", 1.0, 1.0, 5)
    with pytest.raises(ConfigError):
        SweepAxis("delta2", "linear", 0.0, 1.0, 1)


def test_fig2_panel_presets_match_publication():
    assert FIG2_PANELS["A"] == dict(gamma_a=1.0, gamma_b=0.5, delta1=0.001)
    assert FIG2_PANELS["D"] == dict(gamma_a=1.0, gamma_b=1.0, delta1=0.1)
    assert set(FIG2_PANELS) == {"A", "B", "C", "D", "inset"}


def test_point_json(tmp_path):
    out = tmp_path / "point.json"
    rc = run_cli("point", "--delta1", "0.5", "--delta2", "0.5",
                 "--gamma-b", "0.5", "--out", str(out))
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["p_exact"] == pytest.approx(2.0 / 3.0, abs=1e-6)
    assert data["p_cascaded"] == pytest.approx(8.0 / 9.0, rel=1e-12)
    assert data["t"] == "inf"


def test_point_at_finite_time(tmp_path):
    out = tmp_path / "point.csv"
    rc = run_cli("point", "--t", "2.0", "--format", "csv", "--out", str(out))
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[-2] == "t,p_exact,p_cascaded,err"
    fields = lines[-1].split(",")
    assert float(fields[0]) == 2.0
    assert 0.0 < float(fields[1]) < 1.0


def test_bad_config_exits_2(capsys):
    assert run_cli("point", "--gamma-a", "-1") == 2
    assert "error" in capsys.readouterr().err


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("delta1 = 0.5\ndelta2 = 9.0\ngamma_b = 0.5\n")
    out = tmp_path / "p.json"
    rc = run_cli("point", "--config", str(cfg), "--delta2", "0.5", "--out", str(out))
    assert rc == 0
    data = json.loads(out.read_text())
    # the flag beat the file
    assert data["config"]["delta2"] == "0.5"
    assert data["config"]["delta1"] == "0.5"


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("delta_one = 0.5\n")
    assert run_cli("point", "--config", str(cfg)) == 2


def test_bad_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("LAMBDA2P_THREADS", "many")
    out = tmp_path / "s.csv"
    rc = run_cli("sweep", "--count", "2", "--min", "0.5", "--max", "1.0",
                 "--out", str(out))
    assert rc == 2


def test_sweep_csv_schema(tmp_path, monkeypatch):
    monkeypatch.setenv("LAMBDA2P_THREADS", "1")
    out = tmp_path / "s.csv"
    rc = run_cli("sweep", "--count", "3", "--min", "0.2", "--max", "2.0",
                 "--scale", "log", "--out", str(out))
    assert rc == 0
    lines = out.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert any(l.startswith("# sweep_param=delta2") for l in header)
    assert "delta2,p_exact,p_cascaded,err" in lines
    rows = [l for l in lines if not l.startswith("#")][1:]
    assert len(rows) == 3
    vals = np.array([[float(x) for x in r.split(",")] for r in rows])
    assert np.all(np.diff(vals[:, 0]) > 0)  # sorted by swept parameter
    assert np.all((vals[:, 1] >= 0) & (vals[:, 1] <= 1))


def test_sweep_json_includes_seconds(tmp_path, monkeypatch):
    monkeypatch.setenv("LAMBDA2P_THREADS", "1")
    out = tmp_path / "s.json"
    rc = run_cli("sweep", "--count", "2", "--min", "0.5", "--max", "1.0",
                 "--format", "json", "--out", str(out))
    assert rc == 0
    data = json.loads(out.read_text())
    assert len(data["rows"]) == 2
    assert all(r["seconds"] > 0 for r in data["rows"])


def test_field_snapshot(tmp_path):
    out = tmp_path / "field.csv"
    rc = run_cli("field", "--t", "2.0", "--r-points", "9", "--out", str(out))
    assert rc == 0
    psi = (tmp_path / "field_psi.csv").read_text().splitlines()
    phi = (tmp_path / "field_phiba.csv").read_text().splitlines()
    assert "r,t,re,im,abs2" in psi
    assert "r,r2,t,re,im,abs2" in phi
    data = [l for l in psi if not l.startswith("#")][1:]
    assert len(data) == 9


def test_field_t0_all_zero(tmp_path):
    out = tmp_path / "f0.csv"
    assert run_cli("field", "--t", "0", "--r-points", "5", "--out", str(out)) == 0
    psi = (tmp_path / "f0_psi.csv").read_text().splitlines()
    rows = [l for l in psi if not l.startswith("#")][1:]
    assert all(float(r.split(",")[4]) == 0.0 for r in rows)


def test_field_requires_t():
    assert run_cli("field") == 2


def test_run_config_header_roundtrip():
    from lambda2p.core import AtomParams, ModelConfig, PulseParams

    model = ModelConfig(AtomParams(1.0, 0.5), PulseParams(0.5, 2.0))
    cfg = RunConfig("point", model, t=3.0)
    items = dict(cfg.header_items())
    assert items["gamma_b"] == "0.5"
    assert items["delta2"] == "2"
    assert items["t"] == "3"
