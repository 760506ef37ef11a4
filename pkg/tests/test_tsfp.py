"""
tests/test_tsfp.py
Strang-splitting spectral solver: conservation, exactness, temporal order.
"""
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import logging

import numpy as np
import pytest

from mfschrod.core.fields import PotentialFn, RandomSample, WkbData, constant_potential, wkb_initial
from mfschrod.core.grid import SpatialGrid1D, discrete_l2_norm
from mfschrod.errors import DomainError
from mfschrod.experiments.problems import make_problem
from mfschrod.solvers.tsfp import TsfpConfig, count_steps, mass_drift, tsfp_solve, tsfp_step


# ── Fixtures ──────────────────────────────────────────────────────
Z0 = RandomSample(np.zeros(3))


def harmonic_start(eps: float, n: int):
    problem = make_problem("test2a", eps, d1=1)
    grid = SpatialGrid1D(*problem.domain, n)
    return problem, wkb_initial(problem.wkb, Z0, eps, grid)


# ── Steps and configs ─────────────────────────────────────────────
class TestStepping:

    def test_count_steps(self):
        assert count_steps(1.0, 1e-3) == 1000
        assert count_steps(0.0, 0.1) == 0
        with pytest.raises(DomainError):
            count_steps(1.0, 0.3)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            TsfpConfig(tau=0.0, t_final=1.0)
        with pytest.raises(DomainError):
            TsfpConfig(tau=0.1, t_final=-1.0)

    def test_zero_step_is_identity(self):
        problem, psi = harmonic_start(1 / 32, 256)
        assert tsfp_step(psi, problem.potential, Z0, 0.0) is psi

    def test_backward_step_undoes_forward_step(self):
        problem, psi = harmonic_start(1 / 32, 256)
        there = tsfp_step(psi, problem.potential, Z0, 1e-2)
        back = tsfp_step(there, problem.potential, Z0, -1e-2)
        assert np.allclose(back.values, psi.values, atol=1e-12)
        assert back.t == pytest.approx(0.0)


# ── Conservation and exactness ────────────────────────────────────
class TestConservation:

    def test_mass_drift_harmonic(self):
        """eps = 1/32, T = 1: relative L2 drift at roundoff level."""
        eps = 1 / 32
        problem, psi = harmonic_start(eps, 768)
        out = tsfp_solve(psi, problem.potential, Z0, TsfpConfig(tau=1e-3, t_final=1.0))
        m0 = discrete_l2_norm(psi.values, psi.grid.h)
        m1 = discrete_l2_norm(out.values, out.grid.h)
        assert abs(m1 - m0) / m0 <= 1e-12
        assert out.t == pytest.approx(1.0)

    def test_mass_drift_is_logged(self, caplog, monkeypatch):
        monkeypatch.setattr(logging.getLogger("mfschrod"), "propagate", True)
        problem, psi = harmonic_start(1 / 32, 256)
        with caplog.at_level(logging.DEBUG, logger="mfschrod.solvers.tsfp"):
            tsfp_solve(psi, problem.potential, Z0, TsfpConfig(tau=1e-3, t_final=0.05))
        drift = [r for r in caplog.records if "relative mass drift" in r.getMessage()]
        assert len(drift) == 1
        assert drift[0].levelno == logging.DEBUG

    def test_large_mass_drift_is_a_warning(self, caplog, monkeypatch):
        import mfschrod.solvers.tsfp as tsfp

        monkeypatch.setattr(logging.getLogger("mfschrod"), "propagate", True)
        monkeypatch.setattr(tsfp, "MASS_DRIFT_WARN", -1.0)
        problem, psi = harmonic_start(1 / 32, 256)
        with caplog.at_level(logging.DEBUG, logger="mfschrod.solvers.tsfp"):
            tsfp_solve(psi, problem.potential, Z0, TsfpConfig(tau=1e-3, t_final=0.01))
        assert any(r.levelno == logging.WARNING and "mass drift" in r.getMessage() for r in caplog.records)

    def test_mass_drift_measure(self):
        _, psi = harmonic_start(1 / 32, 128)
        assert mass_drift(psi, psi.with_values(1.5 * psi.values, psi.t)) == pytest.approx(0.5)
        assert mass_drift(psi, psi) == 0.0

    def test_plane_wave_under_constant_potential_is_exact(self):
        """Kinetic and potential parts commute: splitting adds no error."""
        eps, k, v0, t = 1 / 8, 4, 10.0, 0.3
        grid = SpatialGrid1D(0.0, 2 * np.pi, 32)
        data = WkbData(n0=lambda x, z: np.ones_like(x), s0=lambda x, z: eps * k * x)
        psi = wkb_initial(data, RandomSample([0.0]), eps, grid)
        out = tsfp_solve(psi, constant_potential(v0), RandomSample([0.0]), TsfpConfig(tau=0.1, t_final=t))
        phase = np.exp(-1j * (eps * k * k / 2 + v0 / eps) * t)
        assert np.allclose(out.values, psi.values * phase, atol=1e-11)

    def test_non_finite_potential(self):
        grid = SpatialGrid1D(0.0, 1.0, 8)
        psi = wkb_initial(WkbData(lambda x, z: np.ones_like(x), lambda x, z: 0 * x), RandomSample([0.0]), 0.5, grid)
        bad = PotentialFn(value=lambda x, z: 1.0 / (x - x[3]))
        with pytest.raises(DomainError, match="node 3"):
            tsfp_step(psi, bad, RandomSample([0.0]), 0.1)


class TestTemporalOrder:

    def test_second_order_in_tau(self):
        """Three-level Richardson estimate at fixed eps = 1/32."""
        eps, t_final = 1 / 32, 0.25
        problem, psi = harmonic_start(eps, 512)
        runs = [
            tsfp_solve(psi, problem.potential, Z0, TsfpConfig(tau=tau, t_final=t_final)).values
            for tau in (1e-3, 5e-4, 2.5e-4)
        ]
        h = psi.grid.h
        coarse = discrete_l2_norm(runs[0] - runs[1], h)
        fine = discrete_l2_norm(runs[1] - runs[2], h)
        order = np.log2(coarse / fine)
        assert 1.7 <= order <= 2.3


class TestSpatialOrder:

    def test_spectral_accuracy_in_space(self):
        """Coarse grids are subsets of the 256-point reference grid."""
        eps = 1 / 8
        problem = make_problem("test2a", eps, d1=1)
        cfg = TsfpConfig(tau=1e-3, t_final=0.2)

        def run(n):
            grid = SpatialGrid1D(*problem.domain, n)
            return tsfp_solve(wkb_initial(problem.wkb, Z0, eps, grid), problem.potential, Z0, cfg).values

        ref = run(256)
        coarse = discrete_l2_norm(run(32) - ref[::8], 2 * np.pi / 32)
        fine = discrete_l2_norm(run(64) - ref[::4], 2 * np.pi / 64)
        assert np.log2(coarse / fine) > 4


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
