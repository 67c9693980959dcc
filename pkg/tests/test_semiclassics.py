"""Semiclassical field, curvature, pumping and rephasing statistics."""

import dataclasses

import numpy as np
import pytest

import fockboost as fb
from fockboost import semiclassics as sc
from fockboost.errors import DegenerateFieldError
from fockboost.model import ModelParams, hamiltonian_rotating, operators
from fockboost.semiclassics import TorusPoint

P = ModelParams.fig1()
T = P.drive_period


def _num_grad(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


class TestEffectiveField:
    def test_point_values(self):
        f = sc.b_eff(3 * np.pi / 2, 0.0, 4.0, P)
        assert np.allclose(f.as_array(),
                           [P.b_m + P.b_d - 2 * P.b_0, 0.0, 0.0])

    def test_b0_zero_matches_drive_field(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        for th in (0.3, 2.2, 5.0):
            assert np.allclose(sc.b_eff(th, 1.0, 7.0, p0).as_array(),
                               fb.drive_field(th, p0).as_array())

    def test_quantum_expectation_oracle(self):
        # <alpha, chi| (H - omega n) |alpha, chi> = -B_eff . <S>_chi
        p = dataclasses.replace(P, n_max=32)
        ops = operators(p.n_max)
        rng = np.random.default_rng(5)
        for _ in range(5):
            t = rng.uniform(0, 10)
            theta2 = rng.uniform(0, 2 * np.pi)
            n = rng.uniform(4, 9)
            axis = rng.normal(size=3)
            psi = fb.with_spin(
                fb.make_coherent(np.sqrt(n) * np.exp(-1j * theta2), p),
                axis, +1)
            h = hamiltonian_rotating(t, p) - p.omega * ops.number
            got = (psi.amps.conj() @ (h @ psi.amps)).real
            spin = np.array([
                (psi.amps.conj() @ (ops.sx @ psi.amps)).real,
                (psi.amps.conj() @ (ops.sy @ psi.amps)).real,
                (psi.amps.conj() @ (ops.sz @ psi.amps)).real])
            theta1 = p.Omega * t + p.theta01
            want = -np.dot(sc.b_eff(theta1, theta2, n, p).as_array(), spin)
            assert got == pytest.approx(want, abs=1e-5)


class TestBerryCurvature:
    def test_zero_when_b0_zero(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        t1, t2 = np.meshgrid(np.linspace(0, 6, 5), np.linspace(0, 6, 5))
        assert np.allclose(sc.berry_curvature(t1, t2, 10.0, p0), 0.0)

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            th1, th2 = rng.uniform(0, 2 * np.pi, size=2)
            n = rng.uniform(2, 30)

            def bhat(t1, t2):
                v = sc.b_eff(t1, t2, n, P).as_array()
                return v / np.linalg.norm(v)

            d1 = _num_grad(lambda x: bhat(x, th2), th1)
            d2 = _num_grad(lambda x: bhat(th1, x), th2)
            want = 0.5 * np.dot(bhat(th1, th2), np.cross(d1, d2))
            got = sc.berry_curvature(th1, th2, n, P)
            assert got == pytest.approx(want, abs=1e-6)

    def test_degenerate_field_raises(self):
        # b_m = b_d and b_0^2 n = (b_m - b_d)^2 = 0 boundary: field vanishes
        p = ModelParams(b_m=1.0, b_d=1.0, b_0=1.0)
        with pytest.raises(DegenerateFieldError):
            sc.berry_curvature(np.pi / 2, 0.0, 0.0, p)


class TestChernNumber:
    def test_inside_window(self):
        assert abs(sc.chern_number(P, 10.0)) == 1

    def test_above_window(self):
        assert sc.chern_number(P, 100.0) == 0

    def test_below_window(self):
        p = ModelParams(b_m=6.0, b_d=2.0, b_0=1.5)
        assert sc.chern_number(p, 1.0) == 0

    def test_prerounding_residual(self):
        for n in (5.0, 10.0, 20.0, 100.0):
            c = sc.chern_integral(P, n)
            assert abs(c - round(c)) < 1e-4


class TestPumpRate:
    def test_zero_when_b0_zero(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        assert sc.ndot_adiabatic(1.0, 2.0, 10.0, p0) == pytest.approx(0.0)

    def test_torus_average_quantized(self):
        c = sc.chern_number(P, 10.0)
        avg = sc.ndot_torus_average(P, 10.0)
        assert avg == pytest.approx(P.Omega * c / (2 * np.pi), abs=1e-6)

    def test_average_independent_of_n_in_window(self):
        vals = [sc.ndot_torus_average(P, n) for n in (5.0, 10.0, 20.0)]
        assert max(vals) - min(vals) < 1e-6

    def test_gradient_term_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            th1, th2 = rng.uniform(0, 2 * np.pi, size=2)
            n = rng.uniform(2, 30)
            dmag = _num_grad(
                lambda x: sc.b_eff(th1, x, n, P).magnitude, th2)
            want = 0.5 * dmag + P.Omega * sc.berry_curvature(th1, th2, n, P)
            assert sc.ndot_adiabatic(th1, th2, n, P) == pytest.approx(
                want, abs=1e-6)

    def test_dn_field_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            th1, th2 = rng.uniform(0, 2 * np.pi, size=2)
            n = rng.uniform(2, 30)
            dn = _num_grad(lambda x: np.array(
                sc._field(th1, th2, x, P)), n)
            assert np.allclose(np.array(sc._field_dn(th1, th2, n, P)), dn,
                               atol=1e-6)


class TestDeltaN:
    def test_zero_time(self):
        assert sc.delta_n_fixed(0.0, TorusPoint(0, 0), 10.0, P, 0.94) == 0.0

    def test_zero_coupling(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        assert sc.delta_n_fixed(5 * T, TorusPoint(1, 2), 10.0, p0,
                                p0.omega) == pytest.approx(0.0, abs=1e-12)

    def test_spread_decreases_with_almost_period(self):
        w = sc.omega_effective(10.0, P)
        spreads = {}
        for h in (2, 12):
            vals = [sc.delta_n_fixed(h * T, TorusPoint(P.theta01, th2),
                                     10.0, P, w)
                    for th2 in 2 * np.pi * np.arange(32) / 32]
            spreads[h] = max(vals) - min(vals)
        assert spreads[12] < spreads[2]


class TestBackaction:
    def test_constant_without_coupling(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        traj = sc.delta_n_backaction(4 * T, TorusPoint(0.5, 1.0), 10.0, p0,
                                     p0.omega)
        assert np.allclose(traj.n, 10.0, atol=1e-12)

    def test_step_halving_convergence(self):
        w = sc.omega_effective(10.0, P)
        a = sc.delta_n_backaction(4 * T, TorusPoint(P.theta01, 1.0), 10.0, P,
                                  w, per_tone=64)
        b = sc.delta_n_backaction(4 * T, TorusPoint(P.theta01, 1.0), 10.0, P,
                                  w, per_tone=128)
        assert abs(a.n[-1] - b.n[-1]) < 1e-6

    def test_rephasing_width_shrinks_with_n0(self):
        # identical initial field geometry (b_0 sqrt(n0) fixed) and the same
        # prescribed torus trajectory isolate the feedback sensitivity
        w = sc.omega_effective(10.0, P)
        spreads = []
        for n0 in (10.0, 40.0, 160.0):
            p = dataclasses.replace(P, b_0=1.5 * np.sqrt(10.0 / n0))
            ens = sc.ensemble_run("backaction", 16, 12 * T, n0, p,
                                  omega_eff=w, samples=4)
            dn = np.array([m.n[-1] for m in ens.members]) - n0
            spreads.append(dn.max() - dn.min())
        assert spreads[0] > spreads[1] > spreads[2]


class TestPhaseIntegral:
    def test_zero_fields(self):
        p0 = ModelParams(b_m=0.0, b_d=1e-12, b_0=0.0)
        phi = sc.phase_integral(3.0, TorusPoint(0, 0), 10.0, p0,
                                omega_eff=p0.omega)
        assert phi == pytest.approx(10.0 * 3.0, rel=1e-9)

    def test_zero_time(self):
        assert sc.phase_integral(0.0, TorusPoint(0, 0), 10.0, P) == 0.0

    def test_spread_smaller_at_larger_almost_period(self):
        w = sc.omega_effective(10.0, P)
        stds = {}
        for h in (2, 12):
            phis = [sc.phase_integral(h * T, TorusPoint(P.theta01, th2),
                                      10.0, P, omega_eff=w)
                    for th2 in 2 * np.pi * np.arange(32) / 32]
            z = np.exp(1j * np.asarray(phis))
            stds[h] = np.sqrt(-2.0 * np.log(np.abs(z.mean())))
        assert stds[12] < stds[2]


class TestDeltaOmega0:
    def test_zero_coupling(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        assert sc.delta_omega0_avg(10.0, p0) == pytest.approx(0.0, abs=1e-14)

    def test_grid_doubling(self):
        a = sc.delta_omega0_avg(10.0, P, grid=256)
        b = sc.delta_omega0_avg(10.0, P, grid=512)
        assert abs(a - b) < 1e-8

    def test_omega_effective_flag(self):
        assert sc.omega_effective(10.0, P, corrected=False) == P.omega
        assert sc.omega_effective(10.0, P) == pytest.approx(
            P.omega + sc.delta_omega0_avg(10.0, P))


class TestEnsemble:
    def test_zero_variance_without_coupling(self):
        p0 = dataclasses.replace(P, b_0=0.0)
        ens = sc.ensemble_run("fixed", 8, 4 * T, 10.0, p0,
                              omega_eff=p0.omega)
        assert np.allclose(ens.variance, 0.0, atol=1e-20)

    def test_quasiperiodic_variance_improves(self):
        w = sc.omega_effective(10.0, P)
        ens = sc.ensemble_run("backaction", 32, 13 * T, 10.0, P, omega_eff=w,
                              samples=13 * 8)
        t = ens.times / T
        v2 = ens.variance[np.argmin(np.abs(t - 2))]
        v12 = ens.variance[np.argmin(np.abs(t - 12))]
        assert v12 < v2

    def test_periodic_variance_grows(self):
        ens = sc.ensemble_run("backaction", 32, 40 * T, 10.0, P,
                              omega_eff=P.Omega * 3.0 / 5.0, samples=80)
        t = ens.times / T
        v = [ens.variance[np.argmin(np.abs(t - 5 * N))] for N in range(1, 9)]
        slope = np.polyfit(np.arange(1, 9), v, 1)[0]
        assert slope > 0

    def test_invalid_kind(self):
        with pytest.raises(ValueError):
            sc.ensemble_run("bogus", 4, T, 10.0, P, omega_eff=1.0)
