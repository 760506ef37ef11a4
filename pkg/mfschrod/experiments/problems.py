"""
experiments/problems.py
Benchmark problems with random initial data and random potentials.

Random inputs come in groups of d1 components; group g enters through the
weighted sum  sum_k z^g_k / (2k),  k = 1..d1.

  test1             [0, 2],    V = 10,           groups p, q, r, s           d = 4 d1
  test2a            [-pi, pi], V = x^2/2,        groups a, b, c              d = 3 d1
  test2b_shift      [-pi, pi], V = x^2/2 + 0.5 sum z^v_k/(2k)   a, b, c, v   d = 4 d1
  test2b_quadratic  [-pi, pi], V = sum z^v_k (k x / 10)^2       a, b, c, v   d = 4 d1
  test2c_kl         [-pi, pi], V = x^2/2, KL modes instead of weighted sums   d = 3 d1
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core.fields import PotentialFn, WkbData, constant_potential, harmonic_potential
from ..errors import ConfigError
from .kl import KLField, kl_eigenpairs

PROBLEM_IDS = ("test1", "test2a", "test2b_shift", "test2b_quadratic", "test2c_kl")

# Test 2(c) draws uniform z on [-1, 1]; sqrt(3) rescales it to unit variance.
UNIT_VARIANCE_SCALE = np.sqrt(3.0)
KL_QUADRATURE_PER_MODE = 16


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    id: str
    d1: int
    eps: float
    domain: Tuple[float, float]
    t_final: float
    potential: PotentialFn
    wkb: WkbData
    p_range: Tuple[float, float]
    groups: int
    q_box: Tuple[float, float]      # FGA phase-space box covering every z
    p_box: Tuple[float, float]
    kl: Optional[KLField] = None

    @property
    def d(self) -> int:
        return self.groups * self.d1

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]


def group_weights(d1: int) -> np.ndarray:
    return 1.0 / (2.0 * np.arange(1, d1 + 1))


def group_sum(z: np.ndarray, g: int, d1: int) -> float:
    return float(np.asarray(z)[g * d1:(g + 1) * d1] @ group_weights(d1))


# ── Test 1 ────────────────────────────────────────────────────────
def _test1(eps: float, d1: int) -> dict:
    def shifts(z):
        return (group_sum(z, 0, d1), group_sum(z, 1, d1), group_sum(z, 2, d1), group_sum(z, 3, d1))

    def n0(x, z):
        sp, sq, _, _ = shifts(z)
        return np.exp(-50.0 * (1.0 + 0.8 * sp) * (x - 1.0 + 0.2 * sq) ** 2) ** 2

    def s0(x, z):
        _, _, sr, ss = shifts(z)
        u = x - 1.0 + 0.2 * sr
        w = x - 1.0 + 0.2 * ss
        return -0.2 * np.logaddexp(5.0 * u, -5.0 * w)

    def ds0(x, z):
        _, _, sr, ss = shifts(z)
        u = x - 1.0 + 0.2 * sr
        w = x - 1.0 + 0.2 * ss
        return -np.tanh(2.5 * (u + w))

    return dict(
        domain=(0.0, 2.0), t_final=0.5, groups=4,
        potential=constant_potential(10.0), wkb=WkbData(n0, s0, ds0),
        p_range=(-2.0, 2.0), q_box=(0.0, 2.0), p_box=(-1.5, 1.5),
    )


# ── Test 2 family ─────────────────────────────────────────────────
def _harmonic_wkb(eps: float, d1: int, kl: Optional[KLField] = None) -> WkbData:
    if kl is None:
        def amp(x, z, g):
            return np.full(np.shape(x), group_sum(z, g, d1))

        def damp(x, z, g):
            return np.zeros(np.shape(x))
    else:
        def amp(x, z, g):
            coeffs = UNIT_VARIANCE_SCALE * np.asarray(z)[g * d1:(g + 1) * d1]
            return coeffs @ kl.scaled_modes(np.atleast_1d(x))

        def damp(x, z, g):
            coeffs = UNIT_VARIANCE_SCALE * np.asarray(z)[g * d1:(g + 1) * d1]
            return coeffs @ kl.scaled_mode_derivatives(np.atleast_1d(x))

    def n0(x, z):
        return np.exp(-(1.0 + 0.6 * amp(x, z, 0)) * (x + 1.0 - 0.4 * amp(x, z, 1)) ** 2 / eps)

    def s0(x, z):
        return x + 1.0 - 0.4 * amp(x, z, 2)

    def ds0(x, z):
        return 1.0 - 0.4 * damp(x, z, 2)

    return WkbData(n0, s0, ds0)


def shifted_harmonic_potential(d1: int) -> PotentialFn:
    return PotentialFn(
        value=lambda x, z: 0.5 * np.asarray(x) ** 2 + 0.5 * group_sum(z, 3, d1),
        gradient=lambda x, z: np.asarray(x, dtype=float),
        hessian=lambda x, z: np.ones(np.shape(x)),
    )


def random_quadratic_potential(d1: int) -> PotentialFn:
    # sum_k z_k (k x / 10)^2 = c(z) x^2 with c(z) = sum_k z_k k^2 / 100
    k2 = np.arange(1, d1 + 1) ** 2 / 100.0

    def curvature(z):
        return float(np.asarray(z)[3 * d1:4 * d1] @ k2)

    return PotentialFn(
        value=lambda x, z: curvature(z) * np.asarray(x) ** 2,
        gradient=lambda x, z: 2.0 * curvature(z) * np.asarray(x, dtype=float),
        hessian=lambda x, z: np.full(np.shape(x), 2.0 * curvature(z)),
    )


def _test2(problem_id: str, eps: float, d1: int, kl_length: float, kl_sigma: float) -> dict:
    domain = (-np.pi, np.pi)
    kl = None
    potential = harmonic_potential()
    groups = 3
    t_final = 1.0
    if problem_id == "test2b_shift":
        potential, groups = shifted_harmonic_potential(d1), 4
    elif problem_id == "test2b_quadratic":
        potential, groups = random_quadratic_potential(d1), 4
    elif problem_id == "test2c_kl":
        kl = kl_eigenpairs(kl_length, kl_sigma, d1, KL_QUADRATURE_PER_MODE * max(d1, 4), domain)
        t_final = 0.1
    return dict(
        domain=domain, t_final=t_final, groups=groups, kl=kl,
        potential=potential, wkb=_harmonic_wkb(eps, d1, kl),
        p_range=(-4.0, 4.0), q_box=(-2.8, 0.8), p_box=(-0.2, 2.2),
    )


def make_problem(
    problem_id: str,
    eps: float,
    d1: int = 5,
    t_final: Optional[float] = None,
    p_range: Optional[Tuple[float, float]] = None,
    kl_length: float = 0.5,
    kl_sigma: float = 0.05,
) -> ProblemSpec:
    if problem_id not in PROBLEM_IDS:
        raise ConfigError(f"unknown problem id '{problem_id}', expected one of {PROBLEM_IDS}", key="problem.id")
    if not 0.0 < eps <= 1.0:
        raise ConfigError(f"eps must lie in (0, 1], got {eps}", key="problem.eps")
    if d1 < 1:
        raise ConfigError(f"d1 must be at least 1, got {d1}", key="problem.d1")
    if problem_id == "test1":
        parts = _test1(eps, d1)
    else:
        parts = _test2(problem_id, eps, d1, kl_length, kl_sigma)
    if t_final is not None:
        parts["t_final"] = t_final
    if p_range is not None:
        parts["p_range"] = tuple(p_range)
    return ProblemSpec(id=problem_id, d1=d1, eps=eps, **parts)
