from .grid import SpatialGrid1D, spectral_derivative, discrete_l2_norm
from .fields import (
    RandomSample, WaveField, ObservablePair, WkbData, PotentialFn,
    constant_potential, harmonic_potential, wkb_initial, observables_from_wave,
)
from .sampling import sample_uniform, make_rng, spawn_seeds

__all__ = [
    "SpatialGrid1D",
    "spectral_derivative",
    "discrete_l2_norm",
    "RandomSample",
    "WaveField",
    "ObservablePair",
    "WkbData",
    "PotentialFn",
    "constant_potential",
    "harmonic_potential",
    "wkb_initial",
    "observables_from_wave",
    "sample_uniform",
    "make_rng",
    "spawn_seeds",
]
