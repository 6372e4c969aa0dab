"""Config grammar, CSV schemas, manifest, CLI exit codes and determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from relaysim.cli import main
from relaysim.config import load_config, resolve_config
from relaysim.errors import ConfigError, OutputExistsError
from relaysim.output import (check_overwrite, write_cdf_csv, write_pc_csv,
                             write_surface_csv)
from relaysim.sweep import GainSurface

MINIMAL = {"scenario": "urban"}


def test_minimal_config_resolves_all_defaults():
    rc = resolve_config(MINIMAL)
    s = rc.scenario
    assert s.isd_m == 500.0
    assert s.n_sites == 19 and s.sectors_per_site == 3
    assert s.ues_per_sector == 10
    assert s.macro_tx_dbm == 46.0 and s.rn_tx_dbm == 30.0
    assert rc.model.penetration_loss_db == 20.0
    assert rc.model.thermal_noise_dbm_hz == -174.0
    assert rc.mapping.sinr_floor_db == -7.0
    assert rc.mapping.max_spectral_eff_bps_hz == 5.4
    assert rc.pc.macro_served.p0_dbm == -101 and rc.pc.macro_served.alpha == 1.0


def test_suburban_defaults():
    rc = resolve_config({"scenario": "suburban"})
    assert rc.scenario.isd_m == 1732.0
    assert rc.pc.macro_served.p0_dbm == -63 and rc.pc.macro_served.alpha == 0.6


def test_unknown_keys_are_hard_errors():
    with pytest.raises(ConfigError, match="unknown config key 'fooo'"):
        resolve_config({"scenario": "urban", "fooo": 1})
    with pytest.raises(ConfigError, match="model.bogus"):
        resolve_config({"scenario": "urban", "model": {"bogus": 2.0}})
    with pytest.raises(ConfigError, match="power_control.macro_served.p0"):
        resolve_config({"scenario": "urban",
                        "power_control": {"macro_served": {"p0": -90}}})


def test_p0_out_of_range_cites_legal_range():
    with pytest.raises(ConfigError, match=r"\[-126, 23\]"):
        resolve_config({"scenario": "urban",
                        "power_control": {"macro_served": {"p0_dbm": -130}}})


def test_alpha_outside_legal_set_rejected():
    with pytest.raises(ConfigError, match="0.4..1.0"):
        resolve_config({"scenario": "urban",
                        "power_control": {"rn_served": {"alpha": 0.3}}})


def test_power_reduction_range_enforced():
    with pytest.raises(ConfigError, match=r"\[0, 16\]"):
        resolve_config({"scenario": "urban", "power_reduction_x_db": 17.0})


def test_nonpaper_isd_is_allowed_but_flagged():
    rc = resolve_config({"scenario": "urban", "isd_m": 650.0})
    assert not rc.scenario.is_paper_isd


def test_resolved_config_round_trips():
    raw = {"scenario": "suburban", "rns_per_sector": 4, "seed": 9,
           "bias_y_db": 3.0,
           "power_control": {"rn_served": {"p_max_dbm": 15.0}},
           "model": {"shadow_std_relay_db": 11.0},
           "mapping": {"bw_eff": 0.6}}
    rc = resolve_config(raw)
    again = resolve_config(rc.to_resolved_dict())
    assert again == rc
    assert again.config_hash() == rc.config_hash()


def test_config_hash_tracks_semantic_changes():
    a = resolve_config(MINIMAL)
    b = resolve_config({"scenario": "urban", "seed": 2})
    c = resolve_config({"scenario": "urban", "seed": 1})
    assert a.config_hash() != b.config_hash()
    assert a.config_hash() == c.config_hash()


def test_load_config_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/path.json")


# ----------------------------------------------------------------- writers

def test_cdf_csv_schema(tmp_path):
    path = tmp_path / "cdf_dl.csv"
    write_cdf_csv(path, [("a", np.array([2.0, 1.0, 3.0]))])
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "run_label,throughput_bps,cdf_fraction"
    assert lines[1] == "a,1.0,0.0"
    assert lines[3] == "a,3.0,1.0"


def test_surface_csv_grid_row_count(tmp_path):
    nx, ny = 17, 5
    surface = GainSurface(np.arange(nx, dtype=float), np.arange(ny, dtype=float),
                          np.zeros((nx, ny)), np.zeros((nx, ny)),
                          np.full((nx, ny), np.nan), "dl")
    path = tmp_path / "surface_dl.csv"
    write_surface_csv(path, surface)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 1 + nx * ny
    assert lines[0].startswith("x_reduction_db,y_bias_db,gain_5pct_percent")


def test_empty_surface_gives_header_only(tmp_path):
    surface = GainSurface(np.empty(0), np.empty(0), np.empty((0, 0)),
                          np.empty((0, 0)), np.empty((0, 0)), "dl")
    path = tmp_path / "surface_dl.csv"
    write_surface_csv(path, surface)
    assert path.read_text().strip().split("\n") == [
        "x_reduction_db,y_bias_db,gain_5pct_percent,gain_50pct_percent,"
        "coverage_fraction"]


def test_overwrite_protection(tmp_path):
    target = tmp_path / "x.csv"
    target.write_text("old")
    with pytest.raises(OutputExistsError):
        check_overwrite([target], overwrite=False)
    check_overwrite([target], overwrite=True)
    check_overwrite([tmp_path / "absent.csv"], overwrite=False)


# --------------------------------------------------------------------- CLI

FAST_RAW = {"scenario": "urban", "n_sites": 7, "ues_per_sector": 2,
            "n_drops": 2, "rns_per_sector": 4, "seed": 5}


def _write_cfg(tmp_path, raw):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    return str(p)


def test_cli_run_success_and_outputs(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    out = tmp_path / "out"
    code = main(["run", "--config", cfg, "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.startswith("run complete")
    for name in ("cdf_dl.csv", "cdf_ul.csv", "resolved_config.json",
                 "manifest.json"):
        assert (out / name).exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 5
    assert "cdf_dl.csv" in manifest["outputs"]


def test_cli_rerun_is_byte_identical(tmp_path):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        assert main(["run", "--config", cfg, "--out", str(out)]) == 0
        outs.append((out / "cdf_dl.csv").read_bytes())
    assert outs[0] == outs[1]


def test_cli_worker_count_does_not_change_output(tmp_path):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    blobs = []
    for name, workers in (("w1", "1"), ("w4", "4")):
        out = tmp_path / name
        assert main(["run", "--config", cfg, "--out", str(out),
                     "--workers", workers]) == 0
        blobs.append((out / "cdf_ul.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_cli_flags_override_config(tmp_path):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--rns", "0",
                 "--seed", "9"]) == 0
    resolved = json.loads((out / "resolved_config.json").read_text())
    assert resolved["rns_per_sector"] == 0
    assert resolved["seed"] == 9


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = dict(FAST_RAW)
    bad["power_control"] = {"macro_served": {"alpha": 0.3}}
    cfg = _write_cfg(tmp_path, bad)
    code = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == 2
    assert "config error" in captured.err
    assert captured.out == ""


def test_cli_missing_scenario_is_config_error(tmp_path):
    assert main(["run", "--out", str(tmp_path / "o")]) == 2


def test_cli_refuses_overwrite_then_allows(tmp_path):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    assert main(["run", "--config", cfg, "--out", str(out)]) == 3
    assert main(["run", "--config", cfg, "--out", str(out),
                 "--overwrite"]) == 0


def test_cli_sweep_writes_surface(tmp_path):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    out = tmp_path / "sweep"
    code = main(["sweep", "--config", cfg, "--out", str(out),
                 "--direction", "dl", "--x-values", "0,8",
                 "--y-values", "0,2"])
    assert code == 0
    lines = (out / "surface_dl.csv").read_text().strip().split("\n")
    assert len(lines) == 1 + 4


def test_cli_coverage_command(tmp_path):
    cfg = _write_cfg(tmp_path, FAST_RAW)
    out = tmp_path / "cov"
    code = main(["coverage", "--config", cfg, "--out", str(out),
                 "--bias-points", "0,8", "--coverage-samples", "400",
                 "--coverage-realizations", "2"])
    assert code == 0
    lines = (out / "coverage.csv").read_text().strip().split("\n")
    assert lines[0] == "x_reduction_db,y_bias_db,coverage_fraction"
    assert len(lines) == 3
    fracs = [float(l.split(",")[2]) for l in lines[1:]]
    assert fracs[1] >= fracs[0]


def test_cli_optimize_pc_smoke(tmp_path):
    raw = dict(FAST_RAW)
    cfg = _write_cfg(tmp_path, raw)
    out = tmp_path / "pc"
    code = main(["optimize-pc", "--config", cfg, "--out", str(out),
                 "--strategy", "i", "--bias-points", "0"])
    assert code == 0
    lines = (out / "pc_i.csv").read_text().strip().split("\n")
    assert lines[0].startswith("strategy,bias_db,served_class")
    assert len(lines) == 3      # two served classes at one bias point
