"""Diagnostics extracted from quantum states.

Everything here is a pure function of a state (or reduced density matrix):
Fock distribution, participation ratio, Husimi Q-function, spin-cavity
entanglement entropy, cavity phase, cat-state fidelity, and the
spin/effective-field alignment metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PhaseUndefinedError
from .model import (_SX, _SY, _SZ, ModelParams, QuantumState, _coherent_amps,
                    operators)

_PHASE_FLOOR = 1e-6


@dataclass
class CavityDensityMatrix:
    """Reduced cavity state rho = Tr_spin |psi><psi|."""

    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        d = self.rho.shape[0]
        if self.rho.shape != (d, d):
            raise ValueError("density matrix must be square")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.rho).real - 1.0) > 1e-10:
            raise ValueError("density matrix trace differs from 1")

    @property
    def n_max(self) -> int:
        return self.rho.shape[0] - 1


def reduced_cavity(psi: QuantumState) -> CavityDensityMatrix:
    """Partial trace over the spin: rho = A A^dag with A the amplitude matrix."""
    a = psi.as_matrix()
    return CavityDensityMatrix(a @ a.conj().T)


def reduced_spin(psi: QuantumState) -> np.ndarray:
    """2x2 spin density matrix (partial trace over the cavity)."""
    a = psi.as_matrix()
    return a.conj().T @ a


def fock_distribution(rho: CavityDensityMatrix) -> np.ndarray:
    return np.clip(np.real(np.diag(rho.rho)), 0.0, None)


def participation_ratio(P: np.ndarray) -> float:
    """PR = 1 / sum_n P(n)^2; equals 1 only for a point mass."""
    P = np.asarray(P, dtype=float)
    return float(1.0 / np.sum(P * P))


def mean_photon_number(psi: QuantumState) -> float:
    n = np.arange(psi.n_max + 1)
    return float(np.dot(n, psi.fock_probabilities()))


@dataclass
class QGrid:
    """Husimi Q sampled on a rectangular grid in the coherent alpha plane."""

    re: np.ndarray
    im: np.ndarray
    Q: np.ndarray  # shape (len(im), len(re)), rows indexed by Im(alpha)

    def integral(self) -> float:
        dre = self.re[1] - self.re[0]
        dim = self.im[1] - self.im[0]
        return float(self.Q.sum() * dre * dim)


def husimi_q(rho: CavityDensityMatrix, grid_points: int = 201,
             extent: float | None = None) -> QGrid:
    """Q(alpha) = (1/pi) <alpha|rho|alpha> on a square grid.

    Default extent covers |alpha| <= sqrt(n_max), the largest radius the
    truncated basis can represent.
    """
    n_max = rho.n_max
    if extent is None:
        extent = float(np.sqrt(n_max))
    axis = np.linspace(-extent, extent, grid_points)
    re, im = np.meshgrid(axis, axis)
    alpha = (re + 1j * im).ravel()

    n = np.arange(n_max + 1)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max + 1)))])
    mag = np.abs(alpha)
    # log |c_n(alpha)| with the n=0 column handled by masking log(0)
    with np.errstate(divide="ignore"):
        log_mag = (-0.5 * mag[:, None] ** 2
                   + n[None, :] * np.log(np.where(mag > 0, mag, 1.0))[:, None]
                   - 0.5 * log_fact[None, :])
    c = np.exp(log_mag) * np.exp(-1j * n[None, :] * np.angle(alpha)[:, None])
    c[mag == 0, 1:] = 0.0
    c[mag == 0, 0] = 1.0
    q = np.einsum("ij,jk,ik->i", c, rho.rho, c.conj()).real / np.pi
    return QGrid(axis, axis, np.clip(q, 0.0, None).reshape(grid_points, grid_points))


def entanglement_entropy(psi: QuantumState) -> float:
    """Von Neumann entropy (nats) of the spin reduction; in [0, ln 2]."""
    w = np.linalg.eigvalsh(reduced_spin(psi))
    w = np.clip(w.real, 0.0, 1.0)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def cavity_amplitude(psi: QuantumState) -> complex:
    """Expectation <a>."""
    ops = operators(psi.n_max)
    return complex(psi.amps.conj() @ (ops.a @ psi.amps))


def cavity_phase(psi: QuantumState, previous: float | None = None) -> float:
    """theta2 = -arg <a>, unwrapped to the branch nearest `previous`."""
    amp = cavity_amplitude(psi)
    if abs(amp) <= _PHASE_FLOOR:
        raise PhaseUndefinedError(
            f"|<a>| = {abs(amp):.3e} below {_PHASE_FLOOR:.0e}; phase undefined"
        )
    phase = -np.angle(amp)
    if previous is not None:
        phase += 2.0 * np.pi * np.round((previous - phase) / (2.0 * np.pi))
    return float(phase)


def unwrap_phase_series(phases: np.ndarray) -> np.ndarray:
    """Nearest-branch continuation of a raw (-pi, pi] phase series."""
    return np.unwrap(np.asarray(phases, dtype=float))


def _cat_amps(alpha: float, n_max: int) -> np.ndarray:
    c = _coherent_amps(alpha, n_max) + _coherent_amps(-alpha, n_max)
    return c / np.linalg.norm(c)


def cat_fidelity(rho: CavityDensityMatrix, alpha: float) -> float:
    c = _cat_amps(alpha, rho.n_max)
    return float((c.conj() @ (rho.rho @ c)).real)


def cat_fidelity_max(rho: CavityDensityMatrix, alpha_range: tuple[float, float],
                     coarse: int = 64, tol: float = 1e-5) -> tuple[float, float]:
    """Maximize <cat(alpha)|rho|cat(alpha)> over real alpha in alpha_range.

    Coarse grid scan followed by golden-section refinement around the best
    grid point; returns (f_max, alpha*).
    """
    lo, hi = alpha_range
    if not (0 <= lo < hi):
        raise ValueError("alpha_range must satisfy 0 <= lo < hi")
    grid = np.linspace(lo, hi, coarse)
    vals = np.array([cat_fidelity(rho, a) for a in grid])
    k = int(np.argmax(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, coarse - 1)]

    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = cat_fidelity(rho, x1), cat_fidelity(rho, x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = cat_fidelity(rho, x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = cat_fidelity(rho, x1)
    alpha_star = 0.5 * (a + b)
    return cat_fidelity(rho, alpha_star), float(alpha_star)


def alignment_metric(psi: QuantumState, theta1: float, p: ModelParams) -> float:
    """M = <Bhat.S> / sqrt(<Bhat^2>) for the operator-valued effective field.

    Bhat_x = (b_m - b_d sin theta1) 1 - (b_0/2)(a + a^dag)
    Bhat_y = -(b_0/2) i (a - a^dag)
    Bhat_z = b_d cos theta1 1
    so coherent-state expectations reproduce the semiclassical field.
    """
    ops = operators(psi.n_max)
    dim = ops.a_cav.shape[0]
    eye = np.eye(dim)
    bx = (p.b_m - p.b_d * np.sin(theta1)) * eye - 0.5 * p.b_0 * (ops.a_cav + ops.a_cav.T)
    by = -0.5j * p.b_0 * (ops.a_cav - ops.a_cav.T)
    bz = p.b_d * np.cos(theta1) * eye

    # Bhat.S on the product space (cavity operators tensored with spin blocks)
    eye_s = np.eye(2)
    bs = np.kron(bx, _SX) + np.kron(by, _SY) + np.kron(bz, _SZ)
    b2 = np.kron(bx @ bx + by @ by + bz @ bz, eye_s)

    v = psi.amps
    num = float((v.conj() @ (bs @ v)).real)
    den = float(np.sqrt((v.conj() @ (b2 @ v)).real))
    return num / den
