"""
tests/test_levelset.py
Delta kernels, WENO5 derivatives, TVD-RK3 and the Liouville level-set solver.
"""
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import numpy as np
import pytest

from mfschrod.core.fields import RandomSample
from mfschrod.core.grid import SpatialGrid1D, discrete_l2_norm
from mfschrod.errors import CflViolationError, DomainError
from mfschrod.experiments import build_model, make_problem
from mfschrod.solvers.kernels import COSINE, KERNEL_KINDS, PIECEWISE_LINEAR, DeltaKernelSpec, delta_kernel
from mfschrod.solvers.levelset import LevelSetState, PhaseGrid, cfl_timestep, ls_init, ls_observables, ls_solve
from mfschrod.solvers.weno import GHOSTS, tvd_rk3, weno5_derivatives


# ── Kernels ───────────────────────────────────────────────────────
class TestDeltaKernels:

    @pytest.mark.parametrize("kind", KERNEL_KINDS)
    @pytest.mark.parametrize("kappa", [1, 2, 3, 4])
    def test_discrete_partition_of_unity(self, kind, kappa):
        dp = 0.1
        nodes = -3.0 + dp * np.arange(61)
        spec = DeltaKernelSpec.from_spacing(kind, dp, kappa)
        rng = np.random.default_rng(kappa)
        for x0 in rng.uniform(-1.5, 1.5, size=100):
            total = delta_kernel(spec, nodes - x0).sum() * dp
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_piecewise_linear_first_moment_is_exact(self):
        dp = 0.1
        nodes = -3.0 + dp * np.arange(61)
        spec = DeltaKernelSpec.from_spacing(PIECEWISE_LINEAR, dp, 2)
        for x0 in (-0.37, 0.0, 0.512, 1.05):
            moment = (nodes * delta_kernel(spec, nodes - x0)).sum() * dp
            assert moment == pytest.approx(x0, abs=1e-12)

    def test_support(self):
        spec = DeltaKernelSpec(COSINE, 0.2)
        assert float(delta_kernel(spec, 0.25)) == 0.0
        assert float(delta_kernel(spec, 0.0)) == pytest.approx(1 / 0.2)

    def test_validation(self):
        with pytest.raises(DomainError):
            DeltaKernelSpec("gaussian", 0.1)
        with pytest.raises(DomainError):
            DeltaKernelSpec.from_spacing(COSINE, 0.1, 0)
        assert DeltaKernelSpec(COSINE, 0.2).is_multiple_of(0.1)
        assert not DeltaKernelSpec(COSINE, 0.25).is_multiple_of(0.1)


# ── WENO and time stepping ────────────────────────────────────────
class TestWeno:

    def test_linear_data_is_exact(self):
        h = 0.05
        x = h * np.arange(20 + 2 * GHOSTS)
        minus, plus = weno5_derivatives(2.0 * x + 1.0, h, axis=0)
        assert minus.shape == (20,)
        assert np.allclose(minus, 2.0, atol=1e-12)
        assert np.allclose(plus, 2.0, atol=1e-12)

    def test_smooth_periodic_data(self):
        n = 128
        h = 2 * np.pi / n
        x = h * np.arange(n)
        padded = np.pad(np.sin(x), GHOSTS, mode="wrap")
        minus, plus = weno5_derivatives(padded, h, axis=0)
        assert np.max(np.abs(minus - np.cos(x))) < 1e-3
        assert np.max(np.abs(plus - np.cos(x))) < 1e-3

    def test_axis_argument(self):
        h = 0.1
        x = h * np.arange(10 + 2 * GHOSTS)
        data = np.tile(3.0 * x, (4, 1))
        minus, _ = weno5_derivatives(data, h, axis=1)
        assert minus.shape == (4, 10)
        assert np.allclose(minus, 3.0)

    def test_tvd_rk3_matches_cubic_taylor_polynomial(self):
        lam, dt = -2.0, 0.1
        (u,) = tvd_rk3((np.array(1.0),), dt, lambda s: (lam * s[0],))
        z = lam * dt
        assert float(u) == pytest.approx(1 + z + z ** 2 / 2 + z ** 3 / 6, abs=1e-14)


# ── Solver ────────────────────────────────────────────────────────
def phase_grid_for_test1(nx=200, np_=40):
    problem = make_problem("test1", 1 / 64, d1=1)
    grid = PhaseGrid(SpatialGrid1D(*problem.domain, nx), -2.0, 2.0, np_)
    return problem, grid


class TestLevelSet:

    def test_phase_grid_excludes_upper_momentum(self):
        _, grid = phase_grid_for_test1()
        assert grid.dp == pytest.approx(0.1)
        assert grid.p[0] == -2.0
        assert grid.p[-1] == pytest.approx(1.9)
        assert grid.shape == (200, 40)

    def test_cfl_timestep(self):
        _, grid = phase_grid_for_test1()
        assert cfl_timestep(grid, lambda x: np.zeros_like(x)) == pytest.approx(0.01 / 4)
        assert cfl_timestep(grid, lambda x: np.zeros_like(x), safety=0.5) == pytest.approx(0.01 / 8)

    def test_cfl_violation(self):
        problem, grid = phase_grid_for_test1()
        state = ls_init(problem.wkb, RandomSample(np.zeros(problem.d)), grid)
        with pytest.raises(CflViolationError) as info:
            ls_solve(state, lambda x: np.zeros_like(x), 0.01, 0.05)
        assert info.value.bound == pytest.approx(0.0025)

    @pytest.mark.parametrize("kind", KERNEL_KINDS)
    def test_initial_density_is_recovered(self, kind):
        problem, grid = phase_grid_for_test1()
        z = RandomSample(np.zeros(problem.d))
        state = ls_init(problem.wkb, z, grid)
        obs = ls_observables(state, DeltaKernelSpec.from_spacing(kind, grid.dp, 2))
        n0 = problem.wkb.n0(grid.xgrid.x, z.z)
        assert np.allclose(obs.rho, n0, atol=1e-12)

    def test_initial_current_with_piecewise_linear_kernel(self):
        problem, grid = phase_grid_for_test1()
        z = RandomSample(np.zeros(problem.d))
        obs = ls_observables(ls_init(problem.wkb, z, grid), DeltaKernelSpec.from_spacing(PIECEWISE_LINEAR, grid.dp, 2))
        x = grid.xgrid.x
        expected = problem.wkb.n0(x, z.z) * problem.wkb.ds0(x, z.z)
        assert np.allclose(obs.current, expected, atol=1e-12)

    def test_kernel_must_match_momentum_spacing(self):
        problem, grid = phase_grid_for_test1()
        state = ls_init(problem.wkb, RandomSample(np.zeros(problem.d)), grid)
        with pytest.raises(DomainError):
            ls_observables(state, DeltaKernelSpec(COSINE, 0.15))

    def test_zero_level_set_brackets_phase_gradient(self):
        problem, grid = phase_grid_for_test1()
        z = RandomSample(np.zeros(problem.d))
        state = ls_init(problem.wkb, z, grid)
        ds0 = problem.wkb.ds0(grid.xgrid.x, z.z)
        rng = np.random.default_rng(8)
        for j in rng.choice(grid.xgrid.n, size=10, replace=False):
            row = state.phi[j]
            assert np.all(np.diff(row) > 0.0)
            k = int(np.flatnonzero(row <= 0.0)[-1])
            assert row[k] <= 0.0 < row[k + 1]
            assert grid.p[k] <= ds0[j] < grid.p[k + 1]

    @pytest.mark.parametrize("kind", KERNEL_KINDS)
    @pytest.mark.parametrize("shift", [1.0, 0.0, -0.5])
    def test_flat_level_set_on_a_grid_momentum(self, kind, shift):
        """f = 1, phi = p - shift with shift on the p-grid: rho = 1 and J = shift."""
        _, grid = phase_grid_for_test1()
        phi = np.broadcast_to(grid.p[None, :] - shift, grid.shape).copy()
        state = LevelSetState(grid, np.ones(grid.shape), phi)
        obs = ls_observables(state, DeltaKernelSpec.from_spacing(kind, grid.dp, 2))
        assert np.allclose(obs.rho, 1.0, atol=1e-10)
        assert np.allclose(obs.current, shift, atol=1e-10)

    def test_density_stays_within_initial_bounds(self):
        problem, grid = phase_grid_for_test1()
        z = RandomSample(np.zeros(problem.d))
        state = ls_init(problem.wkb, z, grid)
        later = ls_solve(state, lambda x: problem.potential.dv(x, z.z), 2.5e-3, 0.5)
        assert later.f.min() >= state.f.min() - 1e-6
        assert later.f.max() <= state.f.max() + 1e-6

    def test_phi_stays_within_initial_range_for_smooth_data(self):
        _, grid = phase_grid_for_test1()
        x = grid.xgrid.x
        phi = grid.p[None, :] - 0.5 * np.sin(np.pi * x)[:, None]
        state = LevelSetState(grid, np.ones(grid.shape), phi)
        later = ls_solve(state, lambda x: np.zeros_like(x), 2.5e-3, 0.1)
        assert later.phi.min() >= phi.min() - 1e-3
        assert later.phi.max() <= phi.max() + 1e-3

    def test_constant_state_is_preserved(self):
        _, grid = phase_grid_for_test1()
        state = LevelSetState(grid, np.full(grid.shape, 2.0), np.full(grid.shape, -1.0))
        later = ls_solve(state, lambda x: np.zeros_like(x), 2.5e-3, 0.05)
        assert np.allclose(later.f, 2.0, atol=1e-12)
        assert np.allclose(later.phi, -1.0, atol=1e-12)

    def test_free_transport_shifts_rows(self):
        """V' = 0: row k moves with speed p_k."""
        _, grid = phase_grid_for_test1()
        x = grid.xgrid.x
        g = np.exp(np.sin(np.pi * x))
        f = np.repeat(g[:, None], grid.np, axis=1)
        t = 0.1
        later = ls_solve(LevelSetState(grid, f, f), lambda x: np.zeros_like(x), 2.5e-3, t)
        exact = np.exp(np.sin(np.pi * (x[:, None] - grid.p[None, :] * t)))
        assert np.max(np.abs(later.f - exact)) <= 1e-3

    def test_short_time_mass(self):
        problem, grid = phase_grid_for_test1()
        z = RandomSample(np.zeros(problem.d))
        v1 = lambda x: problem.potential.dv(x, z.z)
        kernel = DeltaKernelSpec.from_spacing(COSINE, grid.dp, 2)
        state = ls_init(problem.wkb, z, grid)
        m0 = ls_observables(state, kernel).rho.sum() * grid.xgrid.h
        later = ls_solve(state, v1, 1e-3, 0.05)
        m1 = ls_observables(later, kernel).rho.sum() * grid.xgrid.h
        assert later.t == pytest.approx(0.05)
        assert abs(m1 - m0) / m0 < 0.02


# ── Semiclassical limit ───────────────────────────────────────────
class TestAgainstSchrodinger:

    def test_density_matches_tsfp_at_small_eps(self):
        """Before caustics form, the level-set density tracks |psi|^2 up to O(eps)."""
        problem = make_problem("test1", 1 / 256, d1=1, t_final=0.01)
        z = RandomSample(np.zeros(problem.d))
        ref = build_model(problem, "tsfp").evaluate(z)
        approx = build_model(problem, "levelset").evaluate(z)
        rho = np.interp(ref.grid.x, approx.grid.x, approx.rho, period=problem.length)
        h = ref.grid.h
        assert discrete_l2_norm(ref.rho - rho, h) / discrete_l2_norm(ref.rho, h) <= 0.1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
