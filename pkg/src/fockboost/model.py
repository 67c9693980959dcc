"""Driven spin-cavity model: parameters, operators, Hamiltonians, states.

Units: hbar = mu = 1 and energies are quoted in units of the cavity
frequency omega (so omega = 1 in every preset).  The Hilbert space is the
product of a truncated Fock space (n = 0..n_max) and a spin-1/2, stored as
a flat complex vector with index 2*n + s, where s = 0 is spin up (m = +1/2)
along z and s = 1 is spin down.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import TruncationError

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0

# Spin-1/2 blocks (S = sigma/2).
_SX = np.array([[0.0, 0.5], [0.5, 0.0]])
_SY = np.array([[0.0, -0.5j], [0.5j, 0.0]])
_SZ = np.diag([0.5, -0.5])
_SP = np.array([[0.0, 1.0], [0.0, 0.0]])  # S+ = |up><down|
_SM = _SP.T.copy()


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model configuration.

    Defaults are the golden-ratio preset used throughout: Omega/omega =
    (1+sqrt(5))/2, b_m = b_d = 6, b_0 = 1.5, theta01 = 3*pi/2, spin 1/2.
    """

    omega: float = 1.0
    Omega: float = GOLDEN_RATIO
    b_m: float = 6.0
    b_d: float = 6.0
    b_0: float = 1.5
    theta01: float = 3.0 * np.pi / 2.0
    spin: float = 0.5
    n_max: int = 64
    omega_q: float | None = None

    def __post_init__(self):
        if not (self.omega > 0 and self.Omega > 0):
            raise ValueError("omega and Omega must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        for name in ("b_m", "b_d", "b_0", "theta01"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    @property
    def drive_period(self) -> float:
        return 2.0 * np.pi / self.Omega

    def with_lab_frame(self, omega_q: float) -> "ModelParams":
        return replace(self, omega_q=omega_q)

    @classmethod
    def fig1(cls, **overrides) -> "ModelParams":
        """The golden-ratio boosting preset (all defaults)."""
        return cls(**overrides)


@dataclass(frozen=True)
class FieldVector:
    """Energy-valued magnetic field components (mu*B)."""

    x: float
    y: float
    z: float

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass
class QuantumState:
    """Normalized amplitudes on (Fock index n) x (spin index m)."""

    amps: np.ndarray  # flat complex vector, index 2*n + s
    n_max: int
    time: float = 0.0

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (2 * (self.n_max + 1),):
            raise ValueError("amplitude vector has wrong length")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def as_matrix(self) -> np.ndarray:
        """View the amplitudes as an (n_max+1, 2) matrix."""
        return self.amps.reshape(self.n_max + 1, 2)

    def fock_probabilities(self) -> np.ndarray:
        return (np.abs(self.as_matrix()) ** 2).sum(axis=1)

    def tail_mass(self, levels: int = 3) -> float:
        """Probability in the top `levels` Fock states (leakage monitor)."""
        return float(self.fock_probabilities()[-levels:].sum())

    def copy(self) -> "QuantumState":
        return QuantumState(self.amps.copy(), self.n_max, self.time)


class Operators:
    """Cached dense operators on the truncated product space."""

    def __init__(self, n_max: int):
        nvals = np.arange(n_max + 1)
        eye_c = np.eye(n_max + 1)
        eye_s = np.eye(2)
        a = np.diag(np.sqrt(nvals[1:]).astype(float), 1)
        self.n_max = n_max
        self.nvals = nvals
        self.a_cav = a
        self.number = np.kron(np.diag(nvals.astype(float)), eye_s)
        self.a = np.kron(a, eye_s)
        self.sx = np.kron(eye_c, _SX)
        self.sy = np.kron(eye_c, _SY)
        self.sz = np.kron(eye_c, _SZ)
        # Jaynes-Cummings coupling block: a S+ + a^dag S-
        self.jc = np.kron(a, _SP) + np.kron(a.T, _SM)
        # lab-frame coupling block: (a + a^dag) Sx
        self.x_sx = np.kron(a + a.T, _SX)


@lru_cache(maxsize=8)
def operators(n_max: int) -> Operators:
    return Operators(n_max)


def drive_field(theta1: float, p: ModelParams) -> FieldVector:
    """Circularly polarized classical drive field mu*B_c(theta1)."""
    return FieldVector(
        x=p.b_m - p.b_d * np.sin(theta1),
        y=0.0,
        z=p.b_d * np.cos(theta1),
    )


def hamiltonian_rotating(t: float, p: ModelParams) -> np.ndarray:
    """H(t) = omega*n - B_c(theta1(t)).S + (b_0/2)(a S+ + a^dag S-)."""
    if p.spin != 0.5:
        raise ValueError("quantum Hamiltonians are restricted to spin 1/2")
    ops = operators(p.n_max)
    theta1 = p.Omega * t + p.theta01
    bc = drive_field(theta1, p)
    h = p.omega * ops.number
    h = h - bc.x * ops.sx - bc.z * ops.sz
    h = h + 0.5 * p.b_0 * ops.jc
    return h


def hamiltonian_lab(t: float, p: ModelParams) -> np.ndarray:
    """Lab-frame Hamiltonian with carrier omega_q (hierarchy omega_q >> b)."""
    if p.spin != 0.5:
        raise ValueError("quantum Hamiltonians are restricted to spin 1/2")
    if p.omega_q is None:
        raise ValueError("omega_q must be set for the lab frame")
    ops = operators(p.n_max)
    wq = p.omega_q
    theta1 = p.Omega * t + p.theta01
    h = (wq + p.omega) * ops.number
    h = h + (wq - p.b_d * np.cos(theta1)) * ops.sz
    h = h + p.b_0 * ops.x_sx
    h = h - 2.0 * (p.b_m - p.b_d * np.sin(theta1)) * np.cos(wq * t) * ops.sx
    return h


def _check_mass(alpha: complex, p: ModelParams) -> None:
    m = abs(alpha)
    if m * m + 6.0 * m > p.n_max:
        raise TruncationError(
            f"coherent amplitude |alpha| = {m:.3f} does not fit in "
            f"n_max = {p.n_max} (need |alpha|^2 + 6|alpha| <= n_max)"
        )


def _coherent_amps(alpha: complex, n_max: int) -> np.ndarray:
    """Truncated, renormalized coherent amplitudes c_n ~ alpha^n/sqrt(n!)."""
    n = np.arange(n_max + 1)
    if alpha == 0:
        c = np.zeros(n_max + 1, dtype=complex)
        c[0] = 1.0
        return c
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max + 1)))])
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * log_fact
    c = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    return c / np.linalg.norm(c)


def _spin_up_product(cavity: np.ndarray, p: ModelParams, time: float = 0.0) -> QuantumState:
    spinor = np.array([1.0, 0.0], dtype=complex)
    return QuantumState(np.kron(cavity, spinor), p.n_max, time)


def make_fock(n0: int, p: ModelParams) -> QuantumState:
    """|n0> x |up_z>."""
    if not (0 <= n0 <= p.n_max):
        raise TruncationError(f"Fock index {n0} outside 0..{p.n_max}")
    cavity = np.zeros(p.n_max + 1, dtype=complex)
    cavity[n0] = 1.0
    return _spin_up_product(cavity, p)


def make_coherent(alpha: complex, p: ModelParams) -> QuantumState:
    """|alpha> x |up_z>, renormalized after truncation."""
    _check_mass(alpha, p)
    return _spin_up_product(_coherent_amps(alpha, p.n_max), p)


def make_cat(alpha: float, p: ModelParams) -> QuantumState:
    """(|alpha> + |-alpha>) x |up_z>, renormalized after truncation."""
    _check_mass(alpha, p)
    c = _coherent_amps(alpha, p.n_max) + _coherent_amps(-alpha, p.n_max)
    return _spin_up_product(c / np.linalg.norm(c), p)


def spin_eigenvector(axis, sign: int) -> np.ndarray:
    """+-1/2 eigenstate of S along `axis` (FieldVector or 3-array)."""
    if isinstance(axis, FieldVector):
        axis = axis.as_array()
    b = np.asarray(axis, dtype=float)
    mag = np.linalg.norm(b)
    if mag == 0:
        raise ValueError("spin axis must be nonzero")
    b = b / mag
    theta = np.arccos(np.clip(b[2], -1.0, 1.0))
    phi = np.arctan2(b[1], b[0])
    if sign > 0:
        chi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    else:
        chi = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    return chi.astype(complex)


def with_spin(state: QuantumState, axis, sign: int) -> QuantumState:
    """Replace the spin factor of a product state by the +-S state along axis.

    Raises ValueError if the input is not (numerically) a product state.
    """
    mat = state.as_matrix()
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size > 1 and s[1] > 1e-10:
        raise ValueError("state is entangled; cannot reassign the spin factor")
    cavity = u[:, 0] * s[0]
    # fix the arbitrary SVD phase: largest cavity amplitude real positive
    k = int(np.argmax(np.abs(cavity)))
    cavity = cavity * np.exp(-1j * np.angle(cavity[k]))
    cavity = cavity / np.linalg.norm(cavity)
    chi = spin_eigenvector(axis, sign)
    return QuantumState(np.kron(cavity, chi), state.n_max, state.time)


def rotating_frame_map(state: QuantumState, t: float, omega_q: float) -> QuantumState:
    """Apply U(t) = exp[i omega_q t (n + S_z)] (diagonal phases only)."""
    n = np.repeat(np.arange(state.n_max + 1), 2).astype(float)
    m = np.tile([0.5, -0.5], state.n_max + 1)
    phase = np.exp(1j * omega_q * t * (n + m))
    return QuantumState(phase * state.amps, state.n_max, state.time)
