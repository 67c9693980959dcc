"""Fixtures: small experiment outputs generated through the boost CLI.

The rendering package only ever sees CSV files, so the fixtures run the
actual command-line tool (coarse step, short runs, small grids) and cache
one output directory per experiment for the whole session.
"""

import subprocess
import sys
from pathlib import Path

import pytest

SMALL_INI = """\
[model]
n_max = 64
omega_q = 20

[evolution]
periods = 2
dt_max = 0.015625
samples_per_period = 8

[initial]
kind = fock
n0 = 10

[ensemble]
n_theta = 8

[output]
q_grid = 31
"""

EXPERIMENTS = {
    "fig1": "fig1-pn-heatmap",
    "fig2": "fig2-snapshots",
    "fig3": "fig3-semiclassical-ensembles",
    "fig4": "fig4-qfuncs-alignment",
    "fig5": "fig5-phase-drift",
    "fig6": "fig6-labframe",
    "fig7": "fig7-semiclass-vs-quantum",
    "fig8": "fig8-coherent-qfunc",
    "fig9": "fig9-entanglement",
    "fig10": "fig10-rephasing-metrics",
}


@pytest.fixture(scope="session")
def data_for(tmp_path_factory):
    root = tmp_path_factory.mktemp("experiment_data")
    ini = root / "small.ini"
    ini.write_text(SMALL_INI, encoding="utf-8")
    cache: dict[str, Path] = {}

    def run(figure: str) -> Path:
        if figure not in cache:
            out = root / figure
            cmd = [sys.executable, "-m", "fockboost.cli", "run",
                   EXPERIMENTS[figure], "--config", str(ini),
                   "--out", str(out)]
            res = subprocess.run(cmd, capture_output=True, text=True,
                                 timeout=900)
            assert res.returncode == 0, res.stderr
            cache[figure] = out
        return cache[figure]

    return run


@pytest.fixture(scope="session")
def scripts_dir():
    return Path(__file__).resolve().parents[1]
