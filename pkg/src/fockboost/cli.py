"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 physics-guard violation
(Fock-space leakage or field degeneracy), 4 integrator convergence failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import ConfigError, ConvergenceError, PhysicsGuardError
from .experiments import (EXPERIMENTS, load_config, predict_almost_periods,
                          run_experiment, write_csv)

EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_CONVERGENCE = 4


def _fail(exc: Exception) -> int:
    click.echo(f"error: {exc}", err=True)
    if isinstance(exc, (ConfigError, ValueError)):
        return EXIT_CONFIG
    if isinstance(exc, PhysicsGuardError):
        return EXIT_PHYSICS
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    raise exc


@click.group()
def main():
    """Driven spin-cavity boosting simulations."""


@main.command("list")
def list_experiments():
    """Print the registered experiment names."""
    for name in sorted(EXPERIMENTS):
        click.echo(name)


@main.command()
@click.argument("experiment")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="INI configuration file (defaults baked in).")
@click.option("--out", "out_dir", type=click.Path(), default="out",
              show_default=True, help="Output directory.")
@click.option("--no-correction", is_flag=True,
              help="Use the bare cavity frequency (no renormalization).")
@click.option("--seed", type=int, default=None,
              help="Accepted for interface stability; runs are deterministic.")
def run(experiment, config_path, out_dir, no_correction, seed):
    """Run a registered experiment; writes CSV files and a JSON manifest."""
    del seed
    try:
        cfg = load_config(config_path)
        files = run_experiment(experiment, cfg, out_dir,
                               corrected=not no_correction)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        sys.exit(_fail(exc))
    for f in files:
        click.echo(str(f))


@main.command()
@click.argument("what", type=click.Choice(["almost-periods"]))
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Also write the table as CSV into this directory.")
@click.option("--no-correction", is_flag=True,
              help="Use the bare cavity frequency (no renormalization).")
def predict(what, config_path, out_dir, no_correction):
    """Predict rephasing almost periods from the frequency ratio."""
    del what
    try:
        cfg = load_config(config_path)
        table = predict_almost_periods(cfg, corrected=not no_correction)
    except Exception as exc:  # noqa: BLE001
        sys.exit(_fail(exc))

    click.echo(f"n0                = {table['n0']:.6g}")
    click.echo(f"delta_omega0_avg  = {table['delta_omega0']:.10g}")
    click.echo(f"omega_eff         = {table['omega_eff']:.10g}")
    click.echo(f"ratio Omega/omega_eff = {table['ratio']:.10g}")
    coeffs = ", ".join(str(a) for a in table["cf"].coeffs[:8])
    click.echo(f"continued fraction    = [{coeffs}, ...]")
    click.echo("h    k    T/T_drive  kind")
    for ap in table["periods"]:
        T_rel = ap.T * cfg.model.Omega / (2.0 * 3.141592653589793)
        click.echo(f"{ap.h:<4d} {ap.k:<4d} {T_rel:<10.6g} {ap.kind}")

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows = [(ap.h, ap.k, ap.T / cfg.model.drive_period,
                 1.0 if ap.kind == "convergent" else 0.0)
                for ap in table["periods"]]
        path = write_csv(out / "almost_periods.csv",
                         ["h", "k", "time", "is_convergent"], rows)
        click.echo(str(path))


if __name__ == "__main__":
    main()
