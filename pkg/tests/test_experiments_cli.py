"""Experiment registry, config parsing, CSV output and the CLI surface."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from fockboost.cli import main
from fockboost.errors import ConfigError
from fockboost.experiments import (EXPERIMENTS, ExperimentConfig, initial_state,
                                   load_config, predict_almost_periods,
                                   read_csv, run_experiment)

SMALL_INI = """\
[model]
n_max = 64

[evolution]
periods = 2

[ensemble]
n_theta = 8

[output]
q_grid = 31
"""


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL_INI)
    return path


class TestConfig:
    def test_defaults(self):
        cfg = load_config(None)
        assert cfg.model.n_max == 64
        assert cfg.initial_kind == "fock" and cfg.n0 == 10

    def test_file_overrides(self, small_config):
        cfg = load_config(small_config)
        assert cfg.periods == 2
        assert cfg.n_theta == 8

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.ini")

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[model]\nfrequency = 3\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_initial_state_kinds(self):
        for kind in ("fock", "coherent", "cat"):
            cfg = ExperimentConfig(initial_kind=kind)
            psi = initial_state(cfg)
            assert abs(psi.norm - 1.0) < 1e-10


class TestPredict:
    def test_corrected_table(self):
        table = predict_almost_periods(ExperimentConfig())
        assert [ap.h for ap in table["periods"]] == [1, 2, 3, 5, 7, 12]

    def test_bare_table(self):
        table = predict_almost_periods(ExperimentConfig(), corrected=False)
        hs = [ap.h for ap in table["periods"]]
        assert hs[-2:] == [8, 13]
        assert table["delta_omega0"] == 0.0

    def test_zero_coupling_ratio(self):
        import dataclasses
        cfg = ExperimentConfig()
        cfg.model = dataclasses.replace(cfg.model, b_0=0.0)
        table = predict_almost_periods(cfg)
        assert table["ratio"] == pytest.approx(cfg.model.Omega)


class TestRunExperiment:
    def test_unknown_name(self, tmp_path):
        with pytest.raises(ConfigError):
            run_experiment("fig99", ExperimentConfig(), tmp_path)

    def test_fig1_rows_normalized(self, small_config, tmp_path):
        cfg = load_config(small_config)
        out = tmp_path / "fig1"
        files = run_experiment("fig1-pn-heatmap", cfg, out)
        header, data = read_csv(out / "pn_heatmap.csv")
        assert len(header) == 1 + 2 * (cfg.model.n_max + 1)
        assert data.shape[0] == int(cfg.periods * cfg.samples_per_period) + 1
        assert np.allclose(data[:, 1:].sum(axis=1), 1.0, atol=1e-9)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["experiment"] == "fig1-pn-heatmap"
        assert set(f.name for f in files) >= {"pn_heatmap.csv",
                                              "manifest.json"}

    def test_fig3_outputs(self, small_config, tmp_path):
        cfg = load_config(small_config)
        out = tmp_path / "fig3"
        run_experiment("fig3-semiclassical-ensembles", cfg, out)
        header, data = read_csv(out / "variance_quasiperiodic.csv")
        assert header == ["time", "variance"]
        assert np.all(data[:, 1] >= 0)
        header, members = read_csv(out / "members_quasiperiodic.csv")
        assert len(header) == 1 + cfg.n_theta

    def test_determinism(self, small_config, tmp_path):
        cfg = load_config(small_config)
        a, b = tmp_path / "a", tmp_path / "b"
        run_experiment("fig3-semiclassical-ensembles", cfg, a)
        run_experiment("fig3-semiclassical-ensembles", cfg, b)
        for name in ("variance_quasiperiodic.csv", "members_periodic.csv",
                     "almost_periods.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestCli:
    def test_list(self):
        result = CliRunner().invoke(main, ["list"])
        assert result.exit_code == 0
        for name in EXPERIMENTS:
            assert name in result.output

    def test_predict_stdout(self):
        result = CliRunner().invoke(main, ["predict", "almost-periods"])
        assert result.exit_code == 0
        assert "omega_eff" in result.output
        assert "12" in result.output

    def test_predict_no_correction(self):
        result = CliRunner().invoke(
            main, ["predict", "almost-periods", "--no-correction"])
        assert result.exit_code == 0
        lines = [ln for ln in result.output.splitlines()
                 if ln and ln[0].isdigit()]
        hs = [int(ln.split()[0]) for ln in lines]
        assert hs[-2:] == [8, 13]

    def test_run_unknown_experiment_exit_2(self, tmp_path):
        result = CliRunner().invoke(
            main, ["run", "fig99", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_bad_config_exit_2(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[model]\nomega = -1\n")
        result = CliRunner().invoke(
            main, ["run", "fig1-pn-heatmap", "--config", str(bad),
                   "--out", str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_leakage_exit_3(self, tmp_path):
        ini = tmp_path / "tiny.ini"
        ini.write_text("[model]\nn_max = 16\n\n[evolution]\nperiods = 8\n")
        result = CliRunner().invoke(
            main, ["run", "fig1-pn-heatmap", "--config", str(ini),
                   "--out", str(tmp_path / "o")])
        assert result.exit_code == 3

    def test_run_fig3_writes_files(self, small_config, tmp_path):
        out = tmp_path / "out"
        result = CliRunner().invoke(
            main, ["run", "fig3-semiclassical-ensembles",
                   "--config", str(small_config), "--out", str(out)])
        assert result.exit_code == 0
        assert (out / "manifest.json").exists()
