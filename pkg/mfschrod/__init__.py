"""
mfschrod — multi-fidelity solvers for the semiclassical Schrödinger equation
with random inputs.

  high fidelity   : Strang-splitting Fourier pseudospectral (solvers.tsfp)
  low fidelity    : frozen Gaussian approximation (solvers.fga)
  low / medium    : level-set Liouville solver (solvers.levelset)
  surrogate       : greedy point selection + Galerkin coefficients (multifidelity)
"""
__version__ = "0.1.0"
