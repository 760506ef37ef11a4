"""
tests/test_core.py
Grids, wave fields, observables and random sampling.
"""
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import numpy as np
import pytest

from mfschrod.core.fields import (
    ObservablePair, PotentialFn, RandomSample, WaveField, WkbData,
    constant_potential, harmonic_potential, observables_from_wave, wkb_initial,
)
from mfschrod.core.grid import SpatialGrid1D, discrete_l2_norm, spectral_derivative
from mfschrod.core.sampling import sample_uniform, spawn_seeds
from mfschrod.errors import DomainError


# ── Fixtures ──────────────────────────────────────────────────────
GRID = SpatialGrid1D(-np.pi, np.pi, 64)
EPS = 1.0 / 16


def plane_wave_data(k: int) -> WkbData:
    return WkbData(
        n0=lambda x, z: np.ones_like(x),
        s0=lambda x, z: EPS * k * x,
    )


# ── Grid ──────────────────────────────────────────────────────────
class TestSpatialGrid:

    def test_nodes_exclude_right_endpoint(self):
        g = SpatialGrid1D(0.0, 2.0, 8)
        assert g.h == pytest.approx(0.25)
        assert g.x[0] == 0.0
        assert g.x[-1] == pytest.approx(1.75)
        assert len(g.x) == 8

    def test_odd_cell_count_rejected(self):
        with pytest.raises(DomainError):
            SpatialGrid1D(0.0, 1.0, 7)

    def test_empty_interval_rejected(self):
        with pytest.raises(DomainError):
            SpatialGrid1D(1.0, 1.0, 8)

    def test_wavenumbers_in_fft_order(self):
        g = SpatialGrid1D(0.0, 2.0 * np.pi, 8)
        assert np.allclose(g.mu, [0, 1, 2, 3, -4, -3, -2, -1])

    def test_from_spacing_rounds_up_to_even(self):
        g = SpatialGrid1D.from_spacing(0.0, 1.0, 0.3)
        assert g.n == 4

    def test_spectral_derivative_of_trigonometric_polynomial(self):
        x = GRID.x
        d = spectral_derivative(np.sin(3 * x) + np.cos(5 * x), GRID)
        assert np.allclose(d, 3 * np.cos(3 * x) - 5 * np.sin(5 * x), atol=1e-11)

    def test_discrete_norm(self):
        assert discrete_l2_norm(np.ones(GRID.n), GRID.h) == pytest.approx(np.sqrt(2 * np.pi))
        with pytest.raises(DomainError):
            discrete_l2_norm(np.ones(3), 0.0)


# ── Fields ────────────────────────────────────────────────────────
class TestRandomSample:

    def test_components_outside_cube_rejected(self):
        with pytest.raises(DomainError):
            RandomSample([0.5, 1.5])

    def test_value_equality_and_hash(self):
        a, b = RandomSample([0.1, -0.2]), RandomSample(np.array([0.1, -0.2]))
        assert a == b
        assert hash(a) == hash(b)
        assert a.d == 2

    def test_arrays_are_read_only(self):
        z = RandomSample([0.0])
        with pytest.raises(ValueError):
            z.z[0] = 1.0


class TestWaveAndObservables:

    def test_plane_wave_observables(self):
        """rho = 1 and J = eps * k for exp(i k x)."""
        psi = wkb_initial(plane_wave_data(3), RandomSample([0.0]), EPS, GRID)
        obs = observables_from_wave(psi)
        assert np.allclose(obs.rho, 1.0)
        assert np.allclose(obs.current, EPS * 3, atol=1e-12)

    def test_negative_initial_density_names_node(self):
        data = WkbData(n0=lambda x, z: x, s0=lambda x, z: 0 * x)
        with pytest.raises(DomainError, match="node 0"):
            wkb_initial(data, RandomSample([0.0]), EPS, GRID)

    def test_eps_out_of_range(self):
        with pytest.raises(DomainError):
            WaveField(GRID, 0.0, 0.0, np.ones(GRID.n))
        with pytest.raises(DomainError):
            WaveField(GRID, 1.5, 0.0, np.ones(GRID.n))

    def test_negative_density_rejected_unless_unchecked(self):
        rho = np.zeros(GRID.n)
        rho[5] = -1e-6
        with pytest.raises(DomainError, match="node 5"):
            ObservablePair(GRID, rho, np.zeros(GRID.n))
        pair = ObservablePair(GRID, rho, np.zeros(GRID.n), check_density=False)
        assert pair.stacked().shape == (2 * GRID.n,)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            ObservablePair(GRID, np.ones(10), np.ones(10))


class TestPotentials:

    def test_harmonic_derivatives(self):
        v = harmonic_potential()
        x = np.linspace(-1, 1, 5)
        assert np.allclose(v.v(x, None), x ** 2 / 2)
        assert np.allclose(v.dv(x, None), x)
        assert np.allclose(v.d2v(x, None), 1.0)

    def test_constant_potential_broadcasts(self):
        v = constant_potential(10.0)
        assert np.allclose(v.v(GRID.x, None), 10.0)
        assert np.allclose(v.dv(GRID.x, None), 0.0)

    def test_missing_gradient(self):
        v = PotentialFn(value=lambda x, z: 0 * x)
        with pytest.raises(DomainError, match="gradient"):
            v.dv(GRID.x, None)


# ── Sampling ──────────────────────────────────────────────────────
class TestSampling:

    def test_same_seed_same_samples(self):
        a = sample_uniform(4, 10, seed=11)
        b = sample_uniform(4, 10, seed=11)
        assert a == b

    def test_samples_inside_cube(self):
        zs = np.array([s.z for s in sample_uniform(3, 200, seed=1)])
        assert zs.shape == (200, 3)
        assert np.all(np.abs(zs) <= 1.0)

    def test_spawned_seeds_are_distinct_and_stable(self):
        seeds = spawn_seeds(20240521, 3)
        assert len(set(seeds)) == 3
        assert seeds == spawn_seeds(20240521, 3)
        assert sample_uniform(2, 5, seeds[0]) != sample_uniform(2, 5, seeds[1])

    def test_invalid_sizes(self):
        with pytest.raises(DomainError):
            sample_uniform(0, 5, seed=1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
