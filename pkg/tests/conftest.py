"""Shared fixtures: expensive reference evolutions are computed once per
session and reused across the observable and acceptance tests."""

import numpy as np
import pytest

import fockboost as fb
from fockboost import observables as obs
from fockboost.model import hamiltonian_rotating


@pytest.fixture(scope="session")
def fig1_params():
    return fb.ModelParams.fig1()


def _standard_observers():
    return {
        "probs": lambda s: s.fock_probabilities(),
        "mean_n": obs.mean_photon_number,
        "pr": lambda s: obs.participation_ratio(s.fock_probabilities()),
        "s_ent": obs.entanglement_entropy,
    }


@pytest.fixture(scope="session")
def fock_run_16T(fig1_params):
    """Golden-ratio preset, |+x>|10>, 16 drive periods, samples at T/8."""
    p = fig1_params
    psi = fb.with_spin(fb.make_fock(10, p), (1.0, 0.0, 0.0), +1)
    cfg = fb.EvolutionConfig.for_model(p, periods=16)
    return fb.evolve_observed(psi, lambda t: hamiltonian_rotating(t, p), cfg,
                              _standard_observers())


@pytest.fixture(scope="session")
def coherent_run_14T(fig1_params):
    """Same preset from |+x>|alpha=sqrt(10)>, 14 periods, with alignment."""
    p = fig1_params
    psi = fb.with_spin(fb.make_coherent(np.sqrt(10.0), p), (1.0, 0.0, 0.0), +1)
    cfg = fb.EvolutionConfig.for_model(p, periods=14)
    observers = _standard_observers()
    observers["alignment"] = lambda s: obs.alignment_metric(
        s, p.Omega * s.time + p.theta01, p)
    observers["re_a"] = lambda s: obs.cavity_amplitude(s).real
    observers["im_a"] = lambda s: obs.cavity_amplitude(s).imag
    return fb.evolve_observed(psi, lambda t: hamiltonian_rotating(t, p), cfg,
                              observers)


@pytest.fixture(scope="session")
def fock_first_period(fig1_params):
    """Dense sampling (T/64) of the first drive period, Fock start."""
    p = fig1_params
    psi = fb.with_spin(fb.make_fock(10, p), (1.0, 0.0, 0.0), +1)
    cfg = fb.EvolutionConfig.for_model(p, periods=1, samples_per_period=64)
    return fb.evolve_observed(psi, lambda t: hamiltonian_rotating(t, p), cfg,
                              _standard_observers())
