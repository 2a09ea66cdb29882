"""Experiment configs, campaign reports, CLI wiring, determinism."""

import json
import math

import numpy as np
import pytest

from prodhls import ConfigError, ExperimentConfig, make_family
from prodhls.cli import main as cli_main
from prodhls.grid import ProductGrid
from prodhls.harness import (run_necessity_sweep, run_norm_check,
                             run_pointwise_campaign, write_slopes_csv,
                             write_summary_json)


def small_config(**overrides):
    raw = {
        "grid": {"m": 1, "n": 1, "half_width": 1.0, "points_per_axis": 32},
        "exponents": {"alpha": 0.5, "beta": 0.5, "p": 1.3333333333333333},
        "families": ["gaussian", "box"],
        "family_params": {"gaussian": {"sigma": 0.2}},
        "dilations": [[1.0, 1.0], [2.0, 2.0]],
        "seed": 7,
        "points_stride": 8,
    }
    raw.update(overrides)
    return raw


# ---------------------------------------------------------------- config

def test_config_round_trip_and_hash():
    cfg = ExperimentConfig.from_dict(small_config())
    assert cfg.exponents.q == pytest.approx(4.0, rel=1e-12)
    h1 = cfg.sha256()
    h2 = ExperimentConfig.from_dict(small_config()).sha256()
    assert h1 == h2
    h3 = ExperimentConfig.from_dict(small_config(seed=8)).sha256()
    assert h1 != h3


def test_config_rejects_unknown_family():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(small_config(families=["glockenspiel"]))


def test_config_rejects_bad_dilations():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(small_config(dilations=[[0.0, 1.0]]))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(small_config(dilations=[]))


def test_config_rejects_missing_q_when_unbalanced():
    raw = small_config()
    raw["exponents"] = {"alpha": 0.7, "beta": 0.5, "p": 1.3333333333333333}
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(raw)


def test_random_seeded_alias():
    cfg = ExperimentConfig.from_dict(small_config(families=["random-seeded"]))
    fam = make_family("random-seeded", cfg.grid, seed=3)
    f1 = fam(1.0, 1.0)
    fam_alias = make_family("random", cfg.grid, seed=3)
    assert np.array_equal(f1.values, fam_alias(1.0, 1.0).values)


# ---------------------------------------------------------------- families

def test_family_dilation_is_exact_for_analytic_families():
    grid = ProductGrid(m=1, n=1, half_width=1.0, points_per_axis=64)
    fam = make_family("gaussian", grid, {"sigma": 0.2})
    f1 = fam(2.0, 1.0)
    centers = grid.axis_centers()
    expected = np.exp(-np.add.outer((2 * centers) ** 2, centers ** 2) / (2 * 0.04))
    assert np.allclose(f1.values, expected, rtol=1e-13)


def test_spike_family_keeps_cells_at_strong_dilation():
    grid = ProductGrid(m=1, n=1, half_width=1.0, points_per_axis=128)
    fam = make_family("spike", grid, {"half_extent": 0.125})
    f = fam(4.0, 4.0)
    assert np.any(f.values > 0)


def test_tensor_box_asymmetric():
    grid = ProductGrid(m=1, n=1, half_width=1.0, points_per_axis=64)
    fam = make_family("tensor-box", grid)
    f = fam(1.0, 1.0)
    marg_x = f.values.sum(axis=1)
    marg_y = f.values.sum(axis=0)
    assert (marg_x > 0).sum() > (marg_y > 0).sum()


# ---------------------------------------------------------------- campaigns

def test_pointwise_campaign_small():
    cfg = ExperimentConfig.from_dict(small_config())
    rep = run_pointwise_campaign(cfg)
    assert rep.passed
    assert math.isfinite(rep.max_ratio) and rep.max_ratio > 0
    assert sum(r.n_points for r in rep.instances) == len(cfg.dilations) * 2 * 16


def test_pointwise_campaign_zero_function_trivial_pass():
    # a spike family dilated so hard no cell survives produces empty instances
    raw = small_config(families=["spike"],
                       family_params={"spike": {"half_extent": 0.001}},
                       dilations=[[32.0, 32.0]])
    rep = run_pointwise_campaign(ExperimentConfig.from_dict(raw))
    assert rep.passed and rep.max_ratio == 0.0


def test_pointwise_campaign_parallel_matches_serial():
    cfg = ExperimentConfig.from_dict(small_config())
    serial = run_pointwise_campaign(cfg, parallel=1)
    threaded = run_pointwise_campaign(cfg, parallel=4)
    assert [r.max_ratio for r in serial.instances] == [r.max_ratio for r in threaded.instances]


def test_pointwise_rejects_inadmissible_exponents():
    raw = small_config()
    raw["exponents"] = {"alpha": 0.7, "beta": 0.5, "p": 1.3333333333333333, "q": 4.0}
    with pytest.raises(ConfigError):
        run_pointwise_campaign(ExperimentConfig.from_dict(raw))


def test_necessity_ladder_validation():
    raw = small_config(dilations=[[1.0, 1.0]])
    with pytest.raises(ConfigError):
        run_necessity_sweep(ExperimentConfig.from_dict(raw))
    # five points but under a decade of span
    lad = [0.5, 0.7, 1.0, 1.4, 2.0]
    raw = small_config(dilations=[[s, 1.0] for s in lad] + [[1.0, t] for t in lad])
    with pytest.raises(ConfigError):
        run_necessity_sweep(ExperimentConfig.from_dict(raw))


def test_necessity_small_grid_structure():
    lad = [float(s) for s in np.logspace(-0.5, 0.5, 5)]
    raw = small_config(dilations=[[s, 1.0] for s in lad] + [[1.0, t] for t in lad],
                       families=["gaussian"],
                       tolerances={"slope_tolerance": 1.0})
    rep = run_necessity_sweep(ExperimentConfig.from_dict(raw))
    assert rep.theoretical_slope_s == pytest.approx(0.0, abs=1e-12)
    assert len(rep.rows) == 10
    assert rep.passed  # loose tolerance: structure only


def test_norm_check_small():
    cfg = ExperimentConfig.from_dict(small_config())
    rep = run_norm_check(cfg)
    assert rep.passed
    assert rep.max_ratio > 0
    assert len(rep.rows) == 4


def test_norm_check_zero_instance_passes():
    raw = small_config(families=["spike"],
                       family_params={"spike": {"half_extent": 0.001}},
                       dilations=[[32.0, 32.0]])
    rep = run_norm_check(ExperimentConfig.from_dict(raw))
    assert rep.passed
    assert rep.rows[0]["ratio"] == 0.0


# ---------------------------------------------------------------- writers / CLI

def test_summary_embeds_hash_and_version(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config())
    rep = run_norm_check(cfg)
    path = write_summary_json(tmp_path / "summary.json", rep.summary_dict(), cfg)
    payload = json.loads(path.read_text())
    assert payload["config_sha256"] == cfg.sha256()
    assert payload["library_version"]


def test_slopes_csv_columns(tmp_path):
    lad = [float(s) for s in np.logspace(-0.5, 0.5, 5)]
    raw = small_config(dilations=[[s, 1.0] for s in lad] + [[1.0, t] for t in lad],
                       families=["gaussian"], tolerances={"slope_tolerance": 1.0})
    rep = run_necessity_sweep(ExperimentConfig.from_dict(raw))
    path = write_slopes_csv(tmp_path / "slopes.csv", rep)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "s,t,norm_q,norm_p,ratio,log_s,log_ratio"
    assert len(lines) == 11


def write_config(tmp_path, raw, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


def test_cli_pointwise_and_determinism(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli_main(["pointwise", "--config", str(cfg_path), "--out", str(out_a)]) == 0
    assert cli_main(["pointwise", "--config", str(cfg_path), "--out", str(out_b)]) == 0
    for name in ("summary.json", "certificates.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_cli_necessity_writes_outputs(tmp_path):
    lad = [float(s) for s in np.logspace(-0.5, 0.5, 5)]
    raw = small_config(dilations=[[s, 1.0] for s in lad] + [[1.0, t] for t in lad],
                       families=["gaussian"], tolerances={"slope_tolerance": 1.0})
    cfg_path = write_config(tmp_path, raw)
    out = tmp_path / "out"
    assert cli_main(["necessity", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert (out / "slopes.csv").is_file()
    assert (out / "summary.json").is_file()
    again = tmp_path / "again"
    cli_main(["necessity", "--config", str(cfg_path), "--out", str(again)])
    assert (out / "slopes.csv").read_bytes() == (again / "slopes.csv").read_bytes()


def test_cli_normcheck(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "out"
    assert cli_main(["normcheck", "--config", str(cfg_path), "--out", str(out)]) == 0
    payload = json.loads((out / "summary.json").read_text())
    assert payload["experiment"] == "normcheck"


def test_cli_config_error_exit_code(tmp_path):
    missing = tmp_path / "nope.json"
    assert cli_main(["pointwise", "--config", str(missing), "--out", str(tmp_path / "o")]) == 2
    bad = write_config(tmp_path, {"grid": {"m": 9}}, "bad.json")
    assert cli_main(["pointwise", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    # ladder too short is also a config error
    cfg_path = write_config(tmp_path, small_config(), "short.json")
    assert cli_main(["necessity", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 2


def test_cli_assertion_failure_exit_code(tmp_path):
    # an impossibly small pinned constant forces a norm-check failure
    raw = small_config(tolerances={"norm_constant": 1e-6})
    cfg_path = write_config(tmp_path, raw)
    assert cli_main(["normcheck", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 1


def test_cli_seed_override_changes_hash(tmp_path):
    cfg_path = write_config(tmp_path, small_config(families=["random"]))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    cli_main(["normcheck", "--config", str(cfg_path), "--out", str(out_a)])
    cli_main(["normcheck", "--config", str(cfg_path), "--out", str(out_b), "--seed", "99"])
    pa = json.loads((out_a / "summary.json").read_text())
    pb = json.loads((out_b / "summary.json").read_text())
    assert pa["config_sha256"] != pb["config_sha256"]


def test_config_caps_2d_block_grids():
    raw = small_config()
    raw["grid"] = {"m": 2, "n": 1, "half_width": 1.0, "points_per_axis": 64}
    raw["exponents"] = {"alpha": 1.0, "beta": 0.5, "p": 1.5}
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(raw)


def test_cli_violation_dump(tmp_path, monkeypatch):
    # a region-bound violation aborts the campaign with a diagnostic dump
    from prodhls.hedberg import CertificateViolation
    import prodhls.cli as cli_module

    def boom(cfg, parallel=1):
        raise CertificateViolation("synthetic violation",
                                   {"point": [0, 0], "region": "region11"})

    monkeypatch.setattr(cli_module, "run_pointwise_campaign", boom)
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "out"
    assert cli_main(["pointwise", "--config", str(cfg_path), "--out", str(out)]) == 1
    payload = json.loads((out / "violation.json").read_text())
    assert payload["region"] == "region11"


def test_cli_bench_maximal(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "out"
    assert cli_main(["bench-maximal", "--config", str(cfg_path), "--out", str(out)]) == 0
    payload = json.loads((out / "bench.json").read_text())
    devs = [r["max_rel_dev_vs_naive"] for r in payload["results"]
            if "max_rel_dev_vs_naive" in r]
    assert devs and all(d <= 1e-12 for d in devs)
