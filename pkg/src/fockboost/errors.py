"""Exception hierarchy shared across the package."""


class FockBoostError(Exception):
    """Base class for all package errors."""


class ConfigError(FockBoostError):
    """Invalid configuration file or parameter set."""


class PhysicsGuardError(FockBoostError):
    """A physical validity guard tripped (leakage, degeneracy, ...)."""


class TruncationError(PhysicsGuardError):
    """Requested state does not fit in the truncated Fock space."""


class LeakageError(PhysicsGuardError):
    """Probability mass reached the top of the truncated Fock space."""

    def __init__(self, time, tail_mass, threshold):
        self.time = time
        self.tail_mass = tail_mass
        self.threshold = threshold
        super().__init__(
            f"Fock-space leakage {tail_mass:.3e} exceeds {threshold:.1e} "
            f"at t = {time:.6g}; increase n_max"
        )


class DegenerateFieldError(PhysicsGuardError):
    """Effective field vanished (or Chern integral failed to quantize)."""


class PhaseUndefinedError(FockBoostError):
    """Cavity phase requested for a state with |<a>| below threshold."""


class ConvergenceError(FockBoostError):
    """Integrator failed its step-size convergence certificate."""
