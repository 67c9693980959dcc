"""Time-dependent Schrodinger-equation propagation.

The default scheme is a commutator-free fourth-order Magnus-type stepper:
two Hamiltonian evaluations per step at the Gauss-Legendre nodes
t + (1/2 -+ sqrt(3)/6) dt, combined into two exact matrix exponentials.
Each exponential is computed by eigendecomposition of its Hermitian
generator, so every step is exactly unitary up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import ConvergenceError, LeakageError
from .model import ModelParams, QuantumState

# Gauss-Legendre nodes and the fourth-order combination weights.
_NODE_LO = 0.5 - np.sqrt(3.0) / 6.0
_NODE_HI = 0.5 + np.sqrt(3.0) / 6.0
_W_MAJOR = 0.25 + np.sqrt(3.0) / 6.0
_W_MINOR = 0.25 - np.sqrt(3.0) / 6.0

LEAKAGE_THRESHOLD = 1e-8


@dataclass
class EvolutionConfig:
    """Propagation settings.

    dt_max is expressed in units of the drive period 2*pi/Omega, so the
    caller supplies the period via `drive_period` (or the `for_model`
    factory).  Sample times are absolute simulation times.
    """

    dt_max: float = 1.0 / 256.0
    tol_norm: float = 1e-9
    sample_times: np.ndarray = field(default_factory=lambda: np.array([]))
    scheme: str = "cf4"
    drive_period: float = 2.0 * np.pi
    leakage_threshold: float = LEAKAGE_THRESHOLD

    def __post_init__(self):
        self.sample_times = np.asarray(self.sample_times, dtype=float)
        if self.dt_max <= 0:
            raise ValueError("dt_max must be positive")
        if self.tol_norm < 0:
            raise ValueError("tol_norm must be >= 0")
        if self.sample_times.size and np.any(np.diff(self.sample_times) <= 0):
            raise ValueError("sample_times must be strictly increasing")
        if self.scheme != "cf4":
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def dt(self) -> float:
        """Absolute maximum step size."""
        return self.dt_max * self.drive_period

    @classmethod
    def for_model(cls, p: ModelParams, periods: float = 16.0,
                  samples_per_period: int = 8, dt_max: float = 1.0 / 256.0,
                  **kwargs) -> "EvolutionConfig":
        """Default schedule: samples at multiples of T/8 over [0, periods*T].

        Lab-frame runs (omega_q set) shrink the step by omega/omega_q so the
        carrier is resolved.
        """
        T = p.drive_period
        if p.omega_q is not None:
            dt_max = dt_max * p.omega / p.omega_q
        n_samples = int(round(periods * samples_per_period))
        times = T * np.arange(1, n_samples + 1) / samples_per_period
        return cls(dt_max=dt_max, sample_times=times, drive_period=T, **kwargs)


def _cf4_step(psi: np.ndarray, hamiltonian, t: float, dt: float) -> np.ndarray:
    h1 = hamiltonian(t + _NODE_LO * dt)
    h2 = hamiltonian(t + _NODE_HI * dt)
    for gen in (_W_MAJOR * h1 + _W_MINOR * h2, _W_MINOR * h1 + _W_MAJOR * h2):
        w, v = eigh(gen)
        psi = v @ (np.exp(-1j * dt * w) * (v.conj().T @ psi))
    return psi


def _march(psi, hamiltonian, t0, t1, dt_abs, checkpoints, on_sample,
           tol_norm, leakage_threshold):
    """Step from t0 through each checkpoint, calling on_sample at each."""
    t = t0
    vec = psi.amps.copy()
    for target in checkpoints:
        span = target - t
        if span > 0:
            nsteps = max(1, int(np.ceil(span / dt_abs - 1e-12)))
            dt = span / nsteps
            for _ in range(nsteps):
                vec = _cf4_step(vec, hamiltonian, t, dt)
                t += dt
        t = target
        state = QuantumState(vec, psi.n_max, t)
        drift = abs(state.norm - 1.0)
        if drift > tol_norm:
            raise ConvergenceError(
                f"norm drift {drift:.3e} exceeds {tol_norm:.1e} at t = {t:.6g}"
            )
        if leakage_threshold is not None:
            tail = state.tail_mass()
            if tail > leakage_threshold:
                raise LeakageError(t, tail, leakage_threshold)
        on_sample(state)
    return QuantumState(vec, psi.n_max, t1)


def evolve(psi0: QuantumState, hamiltonian, t0: float, t1: float,
           cfg: EvolutionConfig) -> QuantumState:
    """Propagate psi0 from t0 to t1 under H(t) = hamiltonian(t)."""
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    if abs(psi0.norm - 1.0) > 1e-8:
        raise ValueError("initial state must be normalized")
    if t1 == t0:
        out = psi0.copy()
        out.time = t1
        return out
    return _march(psi0, hamiltonian, t0, t1, cfg.dt, [t1], lambda s: None,
                  cfg.tol_norm, cfg.leakage_threshold)


@dataclass
class ObservableSeries:
    """Sampled observable channels, one entry per sample time."""

    times: np.ndarray
    channels: dict[str, np.ndarray]
    final_state: QuantumState

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]


def evolve_observed(psi0: QuantumState, hamiltonian, cfg: EvolutionConfig,
                    observers: dict) -> ObservableSeries:
    """Propagate and record each observer(state) at every sample time.

    Observers map a channel name to a callable QuantumState -> scalar or
    1-d array.  Time zero is always included as the first sample.
    """
    if cfg.sample_times.size == 0:
        raise ValueError("cfg.sample_times must be non-empty")
    t0 = psi0.time
    times = cfg.sample_times
    if times[0] > t0:
        times = np.concatenate([[t0], times])
    records: dict[str, list] = {name: [] for name in observers}

    def on_sample(state: QuantumState):
        for name, fn in observers.items():
            records[name].append(fn(state))

    final = _march(psi0, hamiltonian, t0, times[-1], cfg.dt, list(times),
                   on_sample, cfg.tol_norm, cfg.leakage_threshold)
    channels = {name: np.asarray(vals) for name, vals in records.items()}
    return ObservableSeries(times=times, channels=channels, final_state=final)


def convergence_certificate(psi0: QuantumState, hamiltonian, t0: float,
                            t1: float, cfg: EvolutionConfig,
                            factor: float = 10.0) -> float:
    """Return the vector-norm change of psi(t1) when dt_max is halved.

    Raises ConvergenceError if the change exceeds factor * cfg.tol_norm.
    """
    coarse = evolve(psi0, hamiltonian, t0, t1, cfg)
    fine_cfg = EvolutionConfig(dt_max=cfg.dt_max / 2.0, tol_norm=cfg.tol_norm,
                               sample_times=cfg.sample_times, scheme=cfg.scheme,
                               drive_period=cfg.drive_period,
                               leakage_threshold=cfg.leakage_threshold)
    fine = evolve(psi0, hamiltonian, t0, t1, fine_cfg)
    change = float(np.linalg.norm(coarse.amps - fine.amps))
    if change > factor * cfg.tol_norm:
        raise ConvergenceError(
            f"halving dt changed the final state by {change:.3e} "
            f"(> {factor * cfg.tol_norm:.1e})"
        )
    return change
