"""Simulations of topological energy pumping and Fock-basis boosting in a
driven spin-cavity system: full quantum evolution on a truncated Fock space,
the semiclassical pumping theory, and continued-fraction prediction of the
rephasing almost periods."""

from .errors import (ConfigError, ConvergenceError, DegenerateFieldError,
                     FockBoostError, LeakageError, PhaseUndefinedError,
                     PhysicsGuardError, TruncationError)
from .model import (GOLDEN_RATIO, FieldVector, ModelParams, QuantumState,
                    drive_field, hamiltonian_lab, hamiltonian_rotating,
                    make_cat, make_coherent, make_fock, rotating_frame_map,
                    spin_eigenvector, with_spin)
from .propagate import (EvolutionConfig, ObservableSeries,
                        convergence_certificate, evolve, evolve_observed)

__version__ = "0.1.0"
