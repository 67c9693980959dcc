"""Semiclassical theory of the driven spin-cavity system.

The spin sees an effective field combining the classical drive and the
cavity coherent-state field,

    B_eff(theta1, theta2, n) = (b_m - b_d sin th1 - b_0 sqrt(n) cos th2,
                                -b_0 sqrt(n) sin th2,
                                b_d cos th1),

and, adiabatically aligned to it, pumps photons at the rate

    ndot = S d|B_eff|/d(theta2) + Omega * F,

with F the Berry curvature of the aligned spin state.  All torus averages
use a uniform tensor grid (trapezoid rule == spectral accuracy for smooth
periodic integrands).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DegenerateFieldError
from .model import FieldVector, ModelParams

_TORUS_GRID = 256
_FIELD_FLOOR = 1e-9


@dataclass(frozen=True)
class TorusPoint:
    """Point on the (theta1, theta2) torus, stored in [0, 2*pi)."""

    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", float(np.mod(self.theta1, 2 * np.pi)))
        object.__setattr__(self, "theta2", float(np.mod(self.theta2, 2 * np.pi)))


@dataclass
class SemiclassicalTrajectory:
    """Time series of the prescribed torus angles, occupation and phase."""

    times: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    n: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        lens = {len(self.times), len(self.theta1), len(self.theta2),
                len(self.n), len(self.phi)}
        if len(lens) != 1:
            raise ValueError("trajectory series lengths differ")


def _field(theta1, theta2, n, p: ModelParams):
    """B_eff components, broadcasting over array inputs."""
    sq = np.sqrt(n)
    bx = p.b_m - p.b_d * np.sin(theta1) - p.b_0 * sq * np.cos(theta2)
    by = -p.b_0 * sq * np.sin(theta2)
    bz = p.b_d * np.cos(theta1) * np.ones_like(bx)
    return bx, by, bz


def _field_d1(theta1, theta2, n, p: ModelParams):
    z = np.zeros_like(np.asarray(theta1, dtype=float))
    return -p.b_d * np.cos(theta1) + z, z, -p.b_d * np.sin(theta1) + z


def _field_d2(theta1, theta2, n, p: ModelParams):
    sq = np.sqrt(n)
    z = np.zeros_like(np.asarray(theta2, dtype=float))
    return p.b_0 * sq * np.sin(theta2), -p.b_0 * sq * np.cos(theta2), z


def _field_dn(theta1, theta2, n, p: ModelParams):
    inv = p.b_0 / (2.0 * np.sqrt(n))
    z = np.zeros_like(np.asarray(theta2, dtype=float))
    return -inv * np.cos(theta2) + z, -inv * np.sin(theta2) + z, z


def _magnitude(bx, by, bz):
    return np.sqrt(bx * bx + by * by + bz * bz)


def _check_field(mag):
    if np.any(mag < _FIELD_FLOOR):
        raise DegenerateFieldError("effective field magnitude below 1e-9")


def b_eff(theta1: float, theta2: float, n: float, p: ModelParams) -> FieldVector:
    if n < 0:
        raise ValueError("occupation n must be >= 0")
    bx, by, bz = _field(theta1, theta2, n, p)
    return FieldVector(float(bx), float(by), float(bz))


def berry_curvature(theta1, theta2, n, p: ModelParams, S: float = 0.5):
    """F = S * Bhat . (d1 Bhat x d2 Bhat), from analytic field derivatives."""
    if p.b_0 == 0.0:
        # no theta2 dependence: curvature vanishes identically
        return np.zeros_like(np.asarray(theta1, dtype=float) + theta2)
    bx, by, bz = _field(theta1, theta2, n, p)
    mag = _magnitude(bx, by, bz)
    _check_field(mag)
    d1x, d1y, d1z = _field_d1(theta1, theta2, n, p)
    d2x, d2y, d2z = _field_d2(theta1, theta2, n, p)
    cx = d1y * d2z - d1z * d2y
    cy = d1z * d2x - d1x * d2z
    cz = d1x * d2y - d1y * d2x
    return S * (bx * cx + by * cy + bz * cz) / mag**3


def _torus_grid(points: int):
    t = 2.0 * np.pi * np.arange(points) / points
    return np.meshgrid(t, t, indexing="ij")


def chern_integral(p: ModelParams, n: float, S: float = 0.5,
                   grid: int = _TORUS_GRID) -> float:
    """(1/2*pi) * integral of F over the torus (pre-rounding value)."""
    t1, t2 = _torus_grid(grid)
    f = berry_curvature(t1, t2, n, p, S)
    return float(f.mean() * 2.0 * np.pi)


def chern_number(p: ModelParams, n: float, S: float = 0.5,
                 grid: int = _TORUS_GRID, residual_tol: float = 1e-4) -> int:
    """Rounded Chern integral; errors out near a gap closing."""
    c = chern_integral(p, n, S, grid)
    rounded = int(np.rint(c))
    if abs(c - rounded) > residual_tol:
        raise DegenerateFieldError(
            f"Chern integral {c:.6g} is not within {residual_tol} of an "
            "integer (gap closing?)"
        )
    return rounded


def ndot_adiabatic(theta1, theta2, n, p: ModelParams, S: float = 0.5,
                   Omega: float | None = None):
    """Adiabatic pumping rate S*d2|B_eff| + Omega*F (hbar = mu = 1)."""
    if Omega is None:
        Omega = p.Omega
    if p.b_0 == 0.0:
        # |B_eff| is theta2 independent and F = 0: no pumping
        return np.zeros_like(np.asarray(theta1, dtype=float) + theta2)
    bx, by, bz = _field(theta1, theta2, n, p)
    mag = _magnitude(bx, by, bz)
    _check_field(mag)
    d2x, d2y, d2z = _field_d2(theta1, theta2, n, p)
    dmag = (bx * d2x + by * d2y + bz * d2z) / mag
    return S * dmag + Omega * berry_curvature(theta1, theta2, n, p, S)


def ndot_torus_average(p: ModelParams, n: float, S: float = 0.5,
                       grid: int = _TORUS_GRID) -> float:
    t1, t2 = _torus_grid(grid)
    return float(ndot_adiabatic(t1, t2, n, p, S).mean())


def delta_omega0(theta1, theta2, n, p: ModelParams, S: float = 0.5):
    """Leading cavity-frequency correction -S*(B_eff . dn B_eff)/|B_eff|."""
    if p.b_0 == 0.0:
        # dn B_eff vanishes identically: no correction
        return np.zeros_like(np.asarray(theta1, dtype=float) + theta2)
    bx, by, bz = _field(theta1, theta2, n, p)
    mag = _magnitude(bx, by, bz)
    _check_field(mag)
    dnx, dny, dnz = _field_dn(theta1, theta2, n, p)
    return -S * (bx * dnx + by * dny + bz * dnz) / mag


def delta_omega0_avg(n: float, p: ModelParams, S: float = 0.5,
                     grid: int = _TORUS_GRID) -> float:
    """Uniform torus average [delta_omega0]_theta."""
    t1, t2 = _torus_grid(grid)
    return float(delta_omega0(t1, t2, n, p, S).mean())


def omega_effective(n0: float, p: ModelParams, S: float = 0.5,
                    corrected: bool = True) -> float:
    """omega + [delta_omega0]_theta(n0), or the bare omega if not corrected."""
    if not corrected:
        return p.omega
    return p.omega + delta_omega0_avg(n0, p, S)


def _line_step(T: float, p: ModelParams, omega_eff: float,
               per_tone: int = 64) -> tuple[int, float]:
    """Number of steps and step size resolving both drive tones."""
    h = min(2.0 * np.pi / p.Omega, 2.0 * np.pi / omega_eff) / per_tone
    nsteps = max(2, int(np.ceil(T / h)))
    if nsteps % 2:
        nsteps += 1  # Simpson wants an even interval count
    return nsteps, T / nsteps


def delta_n_fixed(T: float, theta0: TorusPoint, n0: float, p: ModelParams,
                  omega_eff: float, S: float = 0.5, per_tone: int = 64) -> float:
    """Integral of ndot along the prescribed trajectory with n frozen at n0."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return 0.0
    nsteps, dt = _line_step(T, p, omega_eff, per_tone)
    t = np.linspace(0.0, T, nsteps + 1)
    vals = ndot_adiabatic(p.Omega * t + theta0.theta1,
                          omega_eff * t + theta0.theta2, n0, p, S)
    return float(simpson(vals, dx=dt))


def phase_integral(T: float, theta0: TorusPoint, n0: float, p: ModelParams,
                   S: float = 0.5, omega_eff: float | None = None,
                   per_tone: int = 64) -> float:
    """Accumulated phase integral of (omega*n0 - S*|B_eff|) along the path."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return 0.0
    if omega_eff is None:
        omega_eff = omega_effective(n0, p, S)
    nsteps, dt = _line_step(T, p, omega_eff, per_tone)
    t = np.linspace(0.0, T, nsteps + 1)
    bx, by, bz = _field(p.Omega * t + theta0.theta1,
                        omega_eff * t + theta0.theta2, n0, p)
    vals = p.omega * n0 - S * _magnitude(bx, by, bz)
    return float(simpson(vals, dx=dt))


def delta_n_backaction(T: float, theta0: TorusPoint, n0: float, p: ModelParams,
                       omega_eff: float, S: float = 0.5, per_tone: int = 64,
                       samples: int | None = None) -> SemiclassicalTrajectory:
    """RK4 integration of ndot with n fed back into the integrand.

    theta2 stays prescribed as omega_eff * t + theta02; the accumulated
    phase uses n frozen at n0 (only phase differences matter).
    """
    return _integrate_trajectory(T, theta0, n0, p, omega_eff, S, per_tone,
                                 samples, feedback=True)


def delta_n_fixed_trajectory(T: float, theta0: TorusPoint, n0: float,
                             p: ModelParams, omega_eff: float, S: float = 0.5,
                             per_tone: int = 64,
                             samples: int | None = None) -> SemiclassicalTrajectory:
    """Same sampling as the back-action variant, but with n frozen at n0."""
    return _integrate_trajectory(T, theta0, n0, p, omega_eff, S, per_tone,
                                 samples, feedback=False)


def _integrate_trajectory(T, theta0, n0, p, omega_eff, S, per_tone, samples,
                          feedback):
    if T <= 0:
        raise ValueError("T must be > 0")
    nsteps, dt = _line_step(T, p, omega_eff, per_tone)
    if samples is None:
        samples = min(nsteps, 128)
    record_every = max(1, nsteps // samples)

    def rate(t, n):
        arg = n if feedback else n0
        return ndot_adiabatic(p.Omega * t + theta0.theta1,
                              omega_eff * t + theta0.theta2, arg, p, S)

    def energy(t):
        bx, by, bz = _field(p.Omega * t + theta0.theta1,
                            omega_eff * t + theta0.theta2, n0, p)
        return p.omega * n0 - S * _magnitude(bx, by, bz)

    times = [0.0]
    ns = [float(n0)]
    phis = [0.0]
    t, n, phi = 0.0, float(n0), 0.0
    for k in range(nsteps):
        k1 = rate(t, n)
        k2 = rate(t + dt / 2, n + dt * k1 / 2)
        k3 = rate(t + dt / 2, n + dt * k2 / 2)
        k4 = rate(t + dt, n + dt * k3)
        n = n + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        # trapezoid is ample for the smooth phase integrand at this step size
        phi = phi + dt * 0.5 * (energy(t) + energy(t + dt))
        t = t + dt
        if n < 0:
            raise ValueError(f"occupation became negative at t = {t:.6g}")
        if (k + 1) % record_every == 0 or k == nsteps - 1:
            times.append(t)
            ns.append(n)
            phis.append(phi)

    times = np.asarray(times)
    return SemiclassicalTrajectory(
        times=times,
        theta1=np.mod(p.Omega * times + theta0.theta1, 2 * np.pi),
        theta2=np.mod(omega_eff * times + theta0.theta2, 2 * np.pi),
        n=np.asarray(ns),
        phi=np.asarray(phis),
    )


@dataclass
class EnsembleResult:
    """Per-member trajectories plus the across-member variance of n(t)."""

    times: np.ndarray
    members: list[SemiclassicalTrajectory]
    variance: np.ndarray
    theta02_values: np.ndarray


def ensemble_run(kind: str, N_theta: int, T_end: float, n0: float,
                 p: ModelParams, omega_eff: float | None = None,
                 S: float = 0.5, theta01: float | None = None,
                 per_tone: int = 64, samples: int = 128) -> EnsembleResult:
    """Run N_theta members at theta02 = 2*pi*k/N_theta, fixed theta01."""
    if N_theta < 2:
        raise ValueError("N_theta must be >= 2")
    if kind not in ("fixed", "backaction"):
        raise ValueError("kind must be 'fixed' or 'backaction'")
    if omega_eff is None:
        omega_eff = omega_effective(n0, p, S)
    if theta01 is None:
        theta01 = p.theta01

    theta02 = 2.0 * np.pi * np.arange(N_theta) / N_theta
    run = delta_n_backaction if kind == "backaction" else delta_n_fixed_trajectory
    members = [run(T_end, TorusPoint(theta01, th2), n0, p, omega_eff, S,
                   per_tone, samples) for th2 in theta02]
    times = members[0].times
    n_matrix = np.stack([m.n for m in members])
    return EnsembleResult(times=times, members=members,
                          variance=n_matrix.var(axis=0),
                          theta02_values=theta02)
