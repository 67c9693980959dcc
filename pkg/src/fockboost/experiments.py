"""Named experiment presets and deterministic file output.

Each registered experiment reproduces the data behind one figure-style
analysis: quantum Fock-distribution heatmaps, Husimi snapshots,
semiclassical ensembles, lab-frame cross-checks, and rephasing metrics.
Every run writes CSV data files plus a JSON manifest.
"""

from __future__ import annotations

import configparser
import json
import time as _walltime
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import observables as obs
from . import semiclassics as sc
from .errors import ConfigError
from .model import (ModelParams, QuantumState, drive_field, hamiltonian_lab,
                    hamiltonian_rotating, make_cat, make_coherent, make_fock,
                    rotating_frame_map, with_spin)
from .propagate import EvolutionConfig, evolve, evolve_observed
from .quasiperiodic import almost_periods, continued_fraction, torus_return_distance

__version__ = "0.1.0"

_PERIODIC_RATIO = (5, 3)   # Omega/omega_eff used by the periodic ensemble
_PERIODIC_REPEATS = 8      # fundamental periods covered by the periodic run


@dataclass
class ExperimentConfig:
    """Flat configuration mirroring the INI sections."""

    model: ModelParams = field(default_factory=ModelParams.fig1)
    dt_max: float = 1.0 / 256.0
    tol_norm: float = 1e-9
    periods: float = 16.0
    samples_per_period: int = 8
    initial_kind: str = "fock"
    n0: int = 10
    alpha: complex = complex(np.sqrt(10.0))
    spin_axis: str = "x"
    spin_sign: int = 1
    n_theta: int = 32
    q_grid: int = 201

    def evolution(self, p: ModelParams | None = None,
                  periods: float | None = None) -> EvolutionConfig:
        return EvolutionConfig.for_model(
            p if p is not None else self.model,
            periods=periods if periods is not None else self.periods,
            samples_per_period=self.samples_per_period,
            dt_max=self.dt_max, tol_norm=self.tol_norm)


_MODEL_KEYS = {"omega", "omega_drive", "b_m", "b_d", "b_0", "theta01",
               "spin", "n_max", "omega_q"}
_SECTION_KEYS = {
    "model": _MODEL_KEYS,
    "evolution": {"dt_max", "tol_norm", "periods", "samples_per_period"},
    "initial": {"kind", "n0", "alpha_abs", "alpha_phase", "spin_axis",
                "spin_sign"},
    "ensemble": {"n_theta"},
    "output": {"q_grid"},
}


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Read an INI config; missing file sections fall back to the defaults."""
    cfg = ExperimentConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"config file not found: {path}")

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    try:
        if parser.has_section("model"):
            m = parser["model"]
            kwargs = {}
            if "omega" in m:
                kwargs["omega"] = m.getfloat("omega")
            if "omega_drive" in m:
                kwargs["Omega"] = m.getfloat("omega_drive")
            for k in ("b_m", "b_d", "b_0", "theta01", "spin"):
                if k in m:
                    kwargs[k] = m.getfloat(k)
            if "n_max" in m:
                kwargs["n_max"] = m.getint("n_max")
            if "omega_q" in m and m["omega_q"].strip():
                kwargs["omega_q"] = m.getfloat("omega_q")
            cfg.model = ModelParams(**kwargs)
        if parser.has_section("evolution"):
            e = parser["evolution"]
            cfg.dt_max = e.getfloat("dt_max", cfg.dt_max)
            cfg.tol_norm = e.getfloat("tol_norm", cfg.tol_norm)
            cfg.periods = e.getfloat("periods", cfg.periods)
            cfg.samples_per_period = e.getint("samples_per_period",
                                              cfg.samples_per_period)
        if parser.has_section("initial"):
            i = parser["initial"]
            cfg.initial_kind = i.get("kind", cfg.initial_kind).strip()
            cfg.n0 = i.getint("n0", cfg.n0)
            mag = i.getfloat("alpha_abs", abs(cfg.alpha))
            phase = i.getfloat("alpha_phase", float(np.angle(cfg.alpha)))
            cfg.alpha = mag * np.exp(1j * phase)
            cfg.spin_axis = i.get("spin_axis", cfg.spin_axis).strip()
            cfg.spin_sign = i.getint("spin_sign", cfg.spin_sign)
        if parser.has_section("ensemble"):
            cfg.n_theta = parser["ensemble"].getint("n_theta", cfg.n_theta)
        if parser.has_section("output"):
            cfg.q_grid = parser["output"].getint("q_grid", cfg.q_grid)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc

    if cfg.initial_kind not in ("fock", "coherent", "cat"):
        raise ConfigError(f"unknown initial state kind {cfg.initial_kind!r}")
    if cfg.spin_sign not in (-1, 1):
        raise ConfigError("spin_sign must be +1 or -1")
    return cfg


_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def initial_state(cfg: ExperimentConfig) -> QuantumState:
    """Build the configured cavity state with the configured spin factor."""
    p = cfg.model
    if cfg.initial_kind == "fock":
        state = make_fock(cfg.n0, p)
    elif cfg.initial_kind == "coherent":
        state = make_coherent(cfg.alpha, p)
    else:
        state = make_cat(abs(cfg.alpha), p)
    if cfg.spin_axis == "field":
        axis = drive_field(p.theta01, p).as_array()
    elif cfg.spin_axis in _AXES:
        axis = np.array(_AXES[cfg.spin_axis])
    else:
        raise ConfigError(f"unknown spin axis {cfg.spin_axis!r}")
    return with_spin(state, axis, cfg.spin_sign)


# ---------------------------------------------------------------------------
# serialization helpers

def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Load one of our CSV files back as (header, float matrix)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: column count does not match header")
    return header, data


def _validate_outputs(files: list[Path]) -> None:
    for f in files:
        if f.suffix == ".csv":
            read_csv(f)


def _manifest(out_dir: Path, name: str, cfg: ExperimentConfig,
              files: list[Path], extra: dict, t_start: float) -> Path:
    model = asdict(cfg.model)
    payload = {
        "experiment": name,
        "version": __version__,
        "wall_time_s": _walltime.monotonic() - t_start,
        "model": model,
        "evolution": {"dt_max": cfg.dt_max, "tol_norm": cfg.tol_norm,
                      "periods": cfg.periods,
                      "samples_per_period": cfg.samples_per_period},
        "initial": {"kind": cfg.initial_kind, "n0": cfg.n0,
                    "alpha": [cfg.alpha.real, cfg.alpha.imag],
                    "spin_axis": cfg.spin_axis, "spin_sign": cfg.spin_sign},
        "ensemble": {"n_theta": cfg.n_theta},
        "files": [f.name for f in files],
    }
    payload.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2, default=float) + "\n",
                    encoding="utf-8")
    return path


def _standard_observers():
    def pn(state):
        return (np.abs(state.amps) ** 2).real

    return {
        "basis_probs": pn,
        "mean_n": obs.mean_photon_number,
        "pr": lambda s: obs.participation_ratio(s.fock_probabilities()),
        "s_ent": obs.entanglement_entropy,
        "tail_mass": lambda s: s.tail_mass(),
    }


def _run_quantum(cfg: ExperimentConfig, periods: float | None = None,
                 state: QuantumState | None = None, lab: bool = False,
                 extra_observers: dict | None = None):
    p = cfg.model
    if state is None:
        state = initial_state(cfg)
    evo = cfg.evolution(p, periods)
    observers = _standard_observers()
    if extra_observers:
        observers.update(extra_observers)
    H = (lambda t: hamiltonian_lab(t, p)) if lab else (
        lambda t: hamiltonian_rotating(t, p))
    return evolve_observed(state, H, evo, observers)


def _time_col(series, p: ModelParams) -> np.ndarray:
    return series.times / p.drive_period


# ---------------------------------------------------------------------------
# experiments

def _exp_fig1(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    series = _run_quantum(cfg)
    t = _time_col(series, cfg.model)
    dim = series["basis_probs"].shape[1]
    header = ["time"] + [f"prob_{i}" for i in range(dim)]
    files = [write_csv(out / "pn_heatmap.csv", header,
                       np.column_stack([t, series["basis_probs"]]))]
    files.append(write_csv(out / "summary.csv",
                           ["time", "mean_n", "pr", "s_ent"],
                           np.column_stack([t, series["mean_n"],
                                            series["pr"], series["s_ent"]])))
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {"leakage_max": float(series["tail_mass"].max())}


def _snapshot_times(cfg: ExperimentConfig, last: int = 12) -> np.ndarray:
    return np.arange(0, last + 1, dtype=float)


def _exp_snapshots(cfg: ExperimentConfig, out: Path, corrected: bool,
                   prefix: str) -> tuple[list[Path], dict]:
    p = cfg.model
    snaps = _snapshot_times(cfg)
    states: list[QuantumState] = []
    evo = EvolutionConfig(dt_max=cfg.dt_max, tol_norm=cfg.tol_norm,
                          sample_times=p.drive_period * snaps[1:],
                          drive_period=p.drive_period)
    evolve_observed(initial_state(cfg), lambda t: hamiltonian_rotating(t, p),
                    evo, {"state": lambda s: states.append(s.copy()) or 0.0})

    files = []
    pn_rows = []
    for k, st in zip(snaps, states):
        pn_rows.append(np.concatenate([[k], st.fock_probabilities()]))
        q = obs.husimi_q(obs.reduced_cavity(st), grid_points=cfg.q_grid)
        re, im = np.meshgrid(q.re, q.im)
        rows = np.column_stack([re.ravel(), im.ravel(), q.Q.ravel()])
        files.append(write_csv(out / f"{prefix}_qfunc_t{int(k)}.csv",
                               ["re", "im", "Q"], rows))
    header = ["time"] + [f"P_{n}" for n in range(p.n_max + 1)]
    files.insert(0, write_csv(out / f"{prefix}_pn_snapshots.csv", header,
                              pn_rows))
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {}


def _exp_fig3(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    n0 = float(cfg.n0)
    T = p.drive_period
    T_end = cfg.periods * T
    omega_eff = sc.omega_effective(n0, p, corrected=corrected)
    h_per, k_per = _PERIODIC_RATIO
    quasi = sc.ensemble_run("backaction", cfg.n_theta, T_end, n0, p,
                            omega_eff=omega_eff,
                            samples=int(cfg.periods * cfg.samples_per_period))
    periodic = sc.ensemble_run("backaction", cfg.n_theta,
                               _PERIODIC_REPEATS * h_per * T, n0, p,
                               omega_eff=p.Omega * k_per / h_per,
                               samples=_PERIODIC_REPEATS * h_per
                               * cfg.samples_per_period)
    files = []
    for tag, ens in (("quasiperiodic", quasi), ("periodic", periodic)):
        t = ens.times / T
        header = ["time"] + [f"n_member_{k}" for k in range(cfg.n_theta)]
        rows = np.column_stack([t] + [m.n for m in ens.members])
        files.append(write_csv(out / f"members_{tag}.csv", header, rows))
        rows = np.column_stack([t, ens.variance])
        files.append(write_csv(out / f"variance_{tag}.csv",
                               ["time", "variance"], rows))
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {"omega_eff": omega_eff,
                   "periodic_ratio": list(_PERIODIC_RATIO),
                   "periodic_repeats": _PERIODIC_REPEATS}


def _exp_fig4(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    cfg4 = _with(cfg, initial_kind="coherent", periods=14.0)

    def align(state):
        return obs.alignment_metric(state, p.Omega * state.time + p.theta01, p)

    series = _run_quantum(cfg4, extra_observers={"alignment": align})
    t = _time_col(series, p)
    files = [write_csv(out / "alignment.csv", ["time", "alignment", "mean_n"],
                       np.column_stack([t, series["alignment"],
                                        series["mean_n"]]))]
    # Q-function of each initial-state family at a mid-run snapshot
    t_snap = 6.0 * p.drive_period
    evo = EvolutionConfig(dt_max=cfg.dt_max, tol_norm=cfg.tol_norm,
                          sample_times=np.array([t_snap]),
                          drive_period=p.drive_period)
    for kind in ("fock", "coherent", "cat"):
        psi = initial_state(_with(cfg, initial_kind=kind))
        final = evolve(psi, lambda s: hamiltonian_rotating(s, p), 0.0,
                       t_snap, evo)
        q = obs.husimi_q(obs.reduced_cavity(final), grid_points=cfg.q_grid)
        re, im = np.meshgrid(q.re, q.im)
        rows = np.column_stack([re.ravel(), im.ravel(), q.Q.ravel()])
        files.append(write_csv(out / f"qfunc_{kind}.csv",
                               ["re", "im", "Q"], rows))
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {"leakage_max": float(series["tail_mass"].max())}


def _exp_fig5(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    n_members = 8
    n0 = abs(cfg.alpha) ** 2 if cfg.initial_kind == "coherent" else float(cfg.n0)
    delta = sc.delta_omega0_avg(n0, p) if corrected else 0.0
    theta02 = 2.0 * np.pi * np.arange(n_members) / n_members
    columns = []
    times = None
    for th2 in theta02:
        c = _with(cfg, initial_kind="coherent",
                  alpha=np.sqrt(n0) * np.exp(-1j * th2))
        series = _run_quantum(c, extra_observers={
            "re_a": lambda s: obs.cavity_amplitude(s).real,
            "im_a": lambda s: obs.cavity_amplitude(s).imag})
        raw = -np.angle(series["re_a"] + 1j * series["im_a"])
        unwrapped = obs.unwrap_phase_series(raw)
        # pin the starting branch at the prepared phase theta02
        columns.append(unwrapped - unwrapped[0] + th2)
        times = series.times
    t = times / p.drive_period
    drift = [col - (p.omega * times + th2)
             for col, th2 in zip(columns, theta02)]
    header = (["time"] + [f"theta2_member_{k}" for k in range(n_members)]
              + [f"drift_member_{k}" for k in range(n_members)]
              + ["predicted_drift"])
    rows = np.column_stack([t] + columns + drift + [delta * times])
    files = [write_csv(out / "phase_drift.csv", header, rows)]
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {"delta_omega0_avg": delta}


def _exp_fig6(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    omega_q = p.omega_q if p.omega_q is not None else 100.0 * p.omega
    p_lab = p.with_lab_frame(omega_q)
    cfg_rot = _with(cfg, model=p)
    cfg_lab = _with(cfg, model=p_lab)

    rot = _run_quantum(cfg_rot)
    lab = _run_quantum(cfg_lab, lab=True)
    P_rot = rot["basis_probs"].reshape(len(rot.times), -1, 2).sum(axis=2)
    P_lab = lab["basis_probs"].reshape(len(lab.times), -1, 2).sum(axis=2)
    tvd = 0.5 * np.abs(P_rot - P_lab).sum(axis=1)
    t = _time_col(rot, p)
    files = [write_csv(out / "labframe_comparison.csv",
                       ["time", "tvd", "mean_n_rot", "mean_n_lab"],
                       np.column_stack([t, tvd, rot["mean_n"], lab["mean_n"]]))]
    header = ["time"] + [f"P_{n}" for n in range(p.n_max + 1)]
    files.append(write_csv(out / "pn_lab.csv", header,
                           np.column_stack([t, P_lab])))
    files.append(write_csv(out / "pn_rot.csv", header,
                           np.column_stack([t, P_rot])))
    return files, {"omega_q": omega_q, "tvd_max": float(tvd.max())}


def _exp_fig7(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    n0 = float(cfg.n0)
    T = p.drive_period
    periods = 14.0
    series = _run_quantum(_with(cfg, periods=periods))
    t = _time_col(series, p)
    files = [write_csv(out / "quantum.csv", ["time", "mean_n", "pr"],
                       np.column_stack([t, series["mean_n"], series["pr"]]))]

    omega_eff = sc.omega_effective(n0, p, corrected=corrected)
    ens = sc.ensemble_run("backaction", 8, periods * T, n0, p,
                          omega_eff=omega_eff)
    header = ["time"] + [f"n_member_{k}" for k in range(8)]
    files.append(write_csv(out / "semiclassical.csv", header,
                           np.column_stack([ens.times / T]
                                           + [m.n for m in ens.members])))
    dense_t = np.linspace(0.0, periods * T, int(periods) * 64 + 1)
    dist = torus_return_distance(dense_t, p.Omega, omega_eff)
    files.append(write_csv(out / "return_distance.csv",
                           ["time", "distance"],
                           np.column_stack([dense_t / T, dist])))
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {"omega_eff": omega_eff}


def _exp_fig8(cfg: ExperimentConfig, out: Path, corrected: bool):
    return _exp_snapshots(_with(cfg, initial_kind="coherent"), out,
                          corrected, "coherent")


def _exp_fig9(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    fock = _run_quantum(_with(cfg, initial_kind="fock", periods=14.0))
    coh = _run_quantum(_with(cfg, initial_kind="coherent", periods=14.0))
    t = _time_col(fock, p)
    files = [write_csv(out / "entanglement.csv",
                       ["time", "s_ent_fock", "s_ent_coherent"],
                       np.column_stack([t, fock["s_ent"], coh["s_ent"]]))]
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {}


def _exp_fig10(cfg: ExperimentConfig, out: Path, corrected: bool) -> tuple[list[Path], dict]:
    p = cfg.model
    n0 = float(cfg.n0)
    T = p.drive_period
    series = _run_quantum(_with(cfg, initial_kind="fock"))
    alpha0 = np.sqrt(n0)

    def infidelity(state):
        rho = obs.reduced_cavity(state)
        lo = max(0.0, alpha0 - 2.0)
        f, _ = obs.cat_fidelity_max(rho, (lo, alpha0 + 2.5))
        return 1.0 - f

    cat = _run_quantum(_with(cfg, initial_kind="cat", alpha=complex(alpha0)),
                       extra_observers={"cat_infidelity": infidelity})
    omega_eff = sc.omega_effective(n0, p, corrected=corrected)
    dist = torus_return_distance(series.times, p.Omega, omega_eff)
    t = _time_col(series, p)
    files = [write_csv(out / "metrics.csv",
                       ["time", "return_distance", "pr", "cat_infidelity"],
                       np.column_stack([t, dist, series["pr"],
                                        cat["cat_infidelity"]]))]
    files.append(_write_almost_periods(cfg, out, corrected))
    return files, {"omega_eff": omega_eff}


def _with(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    base = {k: getattr(cfg, k) for k in ExperimentConfig.__dataclass_fields__}
    base.update(changes)
    return ExperimentConfig(**base)


def _write_almost_periods(cfg: ExperimentConfig, out: Path,
                          corrected: bool) -> Path:
    table = predict_almost_periods(cfg, corrected=corrected)
    rows = [(ap.h, ap.k, ap.T / cfg.model.drive_period,
             1.0 if ap.kind == "convergent" else 0.0)
            for ap in table["periods"]]
    return write_csv(out / "almost_periods.csv",
                     ["h", "k", "time", "is_convergent"], rows)


EXPERIMENTS = {
    "fig1-pn-heatmap": _exp_fig1,
    "fig2-snapshots": lambda c, o, corr: _exp_snapshots(c, o, corr, "fock"),
    "fig3-semiclassical-ensembles": _exp_fig3,
    "fig4-qfuncs-alignment": _exp_fig4,
    "fig5-phase-drift": _exp_fig5,
    "fig6-labframe": _exp_fig6,
    "fig7-semiclass-vs-quantum": _exp_fig7,
    "fig8-coherent-qfunc": _exp_fig8,
    "fig9-entanglement": _exp_fig9,
    "fig10-rephasing-metrics": _exp_fig10,
}


def run_experiment(name: str, cfg: ExperimentConfig, out_dir: str | Path,
                   corrected: bool = True) -> list[Path]:
    """Run a registered experiment and write its CSV + manifest files."""
    if name not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {name!r}; known: {', '.join(sorted(EXPERIMENTS))}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_start = _walltime.monotonic()
    files, extra = EXPERIMENTS[name](cfg, out, corrected)
    _validate_outputs(files)
    files.append(_manifest(out, name, cfg, files, extra, t_start))
    return files


def predict_almost_periods(cfg: ExperimentConfig, corrected: bool = True,
                           h_max: int = 16) -> dict:
    """Frequency correction, corrected ratio, CF expansion and period table."""
    p = cfg.model
    n0 = abs(cfg.alpha) ** 2 if cfg.initial_kind == "coherent" else float(cfg.n0)
    delta = sc.delta_omega0_avg(n0, p) if corrected else 0.0
    omega_eff = p.omega + delta
    ratio = p.Omega / omega_eff
    cf = continued_fraction(ratio)
    periods = almost_periods(p.Omega, omega_eff, h_max)
    return {"n0": n0, "delta_omega0": delta, "omega_eff": omega_eff,
            "ratio": ratio, "cf": cf, "periods": periods}
