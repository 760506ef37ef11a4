"""
solvers/fga.py
Low-fidelity solver: frozen Gaussian approximation on a single surface.

    psi(t, x) = (2 pi eps)^(-3/2) * integral A(t, q0, p0) exp(i Theta / eps) dq0 dp0
    Theta     = S + P (x - Q) + (i/2) (x - Q)^2

Pipeline: decompose the initial wave into phase-space Gaussians on a uniform
(q0, p0) mesh, move every Gaussian along its classical trajectory (RK4 on
Q, P, S, the flow Jacobian and A), then sum the Gaussians back on a grid.

Amplitude: with d_z = d_q0 - i d_p0 and Z = d_z (Q + i P),
    dA/dt = 1/2 A (d_z P - i d_z Q V''(Q)) / Z
which makes A(t) = A(0) sqrt(Z(t) / Z(0)). At t = 0, Z = 2.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from config.settings import settings
from ..core.fields import PotentialFn, RandomSample, WaveField
from ..core.grid import SpatialGrid1D
from ..errors import DomainError, EmptyEnsembleError, SingularMatrixError
from .tsfp import count_steps

logger = logging.getLogger(__name__)

# a(0, q, p) = 2^(d/2) for d = 1: makes the t = 0 representation reproduce psi0.
INITIAL_AMPLITUDE_FACTOR = np.sqrt(2.0)


@dataclass(frozen=True)
class FGAParticle:
    q: float
    p: float
    s: float
    amp: complex
    jac: np.ndarray      # [[dQ/dq0, dQ/dp0], [dP/dq0, dP/dp0]]


@dataclass(frozen=True, eq=False)
class FGAEnsemble:
    """Particles stored column-wise; `particles` gives the per-particle view."""
    q: np.ndarray
    p: np.ndarray
    s: np.ndarray
    amp: np.ndarray
    jac: np.ndarray      # shape (K, 2, 2)
    weight: float
    eps: float
    t: float = 0.0

    def __post_init__(self):
        k = np.shape(self.q)[0] if np.ndim(self.q) else 0
        if k < 1:
            raise EmptyEnsembleError("ensemble needs at least one particle")
        if not self.weight > 0:
            raise DomainError(f"phase-space weight must be positive, got {self.weight}")
        for name in ("p", "s", "amp"):
            if np.shape(getattr(self, name)) != (k,):
                raise DomainError(f"particle field '{name}' must have shape ({k},)")
        if np.shape(self.jac) != (k, 2, 2):
            raise DomainError(f"flow Jacobian must have shape ({k}, 2, 2)")
        for name, dtype in (("q", float), ("p", float), ("s", float), ("amp", complex), ("jac", float)):
            arr = np.array(getattr(self, name), dtype=dtype, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.q.shape[0]

    @property
    def particles(self) -> List[FGAParticle]:
        return [
            FGAParticle(float(self.q[k]), float(self.p[k]), float(self.s[k]), complex(self.amp[k]), self.jac[k])
            for k in range(len(self))
        ]

    @classmethod
    def from_particles(cls, particles: List[FGAParticle], weight: float, eps: float, t: float = 0.0) -> "FGAEnsemble":
        return cls(
            q=np.array([pt.q for pt in particles]),
            p=np.array([pt.p for pt in particles]),
            s=np.array([pt.s for pt in particles]),
            amp=np.array([pt.amp for pt in particles]),
            jac=np.array([pt.jac for pt in particles]).reshape(-1, 2, 2),
            weight=weight, eps=eps, t=t,
        )

    def jacobian_det(self) -> np.ndarray:
        return np.linalg.det(self.jac)


# ── Decomposition ─────────────────────────────────────────────────
def phase_space_mesh(qp_box: Tuple[float, float, float, float], nq: int, np_: int):
    q_min, q_max, p_min, p_max = qp_box
    if not (q_max > q_min and p_max > p_min):
        raise DomainError(f"phase-space box is empty: {qp_box}")
    if nq < 2 or np_ < 2:
        raise DomainError(f"need at least 2 mesh points per direction, got nq={nq}, np={np_}")
    q = np.linspace(q_min, q_max, nq)
    p = np.linspace(p_min, p_max, np_)
    return q, p, q[1] - q[0], p[1] - p[0]


def initial_amplitudes(field: WaveField, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """
    A(0, q_i, p_k) = 2^(1/2) * integral psi0(y) exp((i/eps)(-p (y - q) + (i/2)(y - q)^2)) dy,
    trapezoidal rule on the field's periodic grid. Returns shape (nq, np).
    """
    eps = field.eps
    y = field.grid.x
    envelope = np.exp(-((y[None, :] - q[:, None]) ** 2) / (2.0 * eps))        # (nq, n)
    weighted = field.values[None, :] * envelope
    oscillation = np.exp(-1j * np.outer(y, p) / eps)                           # (n, np)
    integral = field.grid.h * (weighted @ oscillation)
    return INITIAL_AMPLITUDE_FACTOR * integral * np.exp(1j * np.outer(q, p) / eps)


def fga_decompose(
    field: WaveField,
    qp_box: Tuple[float, float, float, float],
    nq: int,
    np_: int,
    keep_threshold: float = 1e-4,
) -> FGAEnsemble:
    if not (0.0 <= keep_threshold < 1.0):
        raise DomainError(f"keep_threshold must lie in [0, 1), got {keep_threshold}")
    q, p, dq, dp = phase_space_mesh(qp_box, nq, np_)
    amp = initial_amplitudes(field, q, p)
    mag = np.abs(amp)
    peak = mag.max()
    if not peak > 0:
        raise EmptyEnsembleError("initial wave has no phase-space content inside the box")
    keep = mag >= keep_threshold * peak
    qq, pp = np.meshgrid(q, p, indexing="ij")
    k = int(keep.sum())
    logger.debug("[FGA] kept %d of %d particles (threshold %.1e)", k, nq * np_, keep_threshold)
    return FGAEnsemble(
        q=qq[keep], p=pp[keep], s=np.zeros(k), amp=amp[keep],
        jac=np.broadcast_to(np.eye(2), (k, 2, 2)),
        weight=dq * dp, eps=field.eps, t=field.t,
    )


# ── Evolution ─────────────────────────────────────────────────────
class _Flow:
    """Right-hand side of the coupled (Q, P, S, jac, A) system for fixed z."""

    def __init__(self, potential: PotentialFn, z: RandomSample):
        self.potential = potential
        self.z = z.z

    def __call__(self, state):
        q, p, s, jac, amp = state
        v = self.potential.v(q, self.z)
        dv = self.potential.dv(q, self.z)
        d2v = self.potential.d2v(q, self.z)

        djac = np.empty_like(jac)
        djac[:, 0, :] = jac[:, 1, :]
        djac[:, 1, :] = -d2v[:, None] * jac[:, 0, :]

        dz_q = jac[:, 0, 0] - 1j * jac[:, 0, 1]
        dz_p = jac[:, 1, 0] - 1j * jac[:, 1, 1]
        zmat = dz_q + 1j * dz_p
        small = np.abs(zmat) < 1e-12
        if np.any(small):
            k = int(np.flatnonzero(small)[0])
            raise SingularMatrixError(f"Z is singular for particle {k} (|Z|={abs(zmat[k]):.3e})")
        damp = 0.5 * amp * (dz_p - 1j * dz_q * d2v) / zmat

        return p, -dv, 0.5 * p * p - v, djac, damp


def _axpy(state, k, c):
    return tuple(y + c * dy for y, dy in zip(state, k))


def rk4_step(flow: _Flow, state, tau: float):
    k1 = flow(state)
    k2 = flow(_axpy(state, k1, 0.5 * tau))
    k3 = flow(_axpy(state, k2, 0.5 * tau))
    k4 = flow(_axpy(state, k3, tau))
    return tuple(
        y + (tau / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for y, a, b, c, d in zip(state, k1, k2, k3, k4)
    )


def fga_evolve(
    ens: FGAEnsemble,
    potential: PotentialFn,
    z: RandomSample,
    tau: float,
    t_final: float,
) -> FGAEnsemble:
    """Advance every particle by classical RK4 with step tau up to t_final."""
    if not tau > 0:
        raise DomainError(f"time step must be positive, got tau={tau}")
    n_steps = count_steps(t_final, tau)
    if n_steps == 0:
        return ens
    flow = _Flow(potential, z)
    state = (
        ens.q.copy(), ens.p.copy(), ens.s.copy(),
        ens.jac.copy(), ens.amp.copy(),
    )
    for _ in range(n_steps):
        state = rk4_step(flow, state, tau)
    q, p, s, jac, amp = state
    return FGAEnsemble(q=q, p=p, s=s, amp=amp, jac=jac, weight=ens.weight, eps=ens.eps, t=ens.t + t_final)


# ── Reconstruction ────────────────────────────────────────────────
def fga_reconstruct(ens: FGAEnsemble, grid: SpatialGrid1D) -> WaveField:
    """
    psi(x_j) = (2 pi eps)^(-3/2) * weight * sum_k A_k exp((i/eps) Theta_k(x_j)).

    Displacements x_j - Q_k use the nearest periodic image. Gaussians are
    cut at settings.fga_cutoff_factor * sqrt(eps); for the default factor 10
    the neglected tail is exp(-50) of the peak.
    Particles are summed in fixed blocks so results do not depend on threads.
    """
    eps = ens.eps
    x = grid.x
    length = grid.length
    radius = settings.fga_cutoff_factor * np.sqrt(eps)
    psi = np.zeros(grid.n, dtype=complex)
    chunk = max(1, settings.fga_chunk)
    for start in range(0, len(ens), chunk):
        sl = slice(start, start + chunk)
        q, p, s, amp = ens.q[sl], ens.p[sl], ens.s[sl], ens.amp[sl]
        disp = x[:, None] - q[None, :]
        disp -= length * np.round(disp / length)
        inside = np.abs(disp) <= radius
        exponent = 1j * (s[None, :] + p[None, :] * disp) / eps - disp ** 2 / (2.0 * eps)
        terms = np.where(inside, amp[None, :] * np.exp(np.where(inside, exponent, 0.0)), 0.0)
        psi += terms.sum(axis=1)
    psi *= ens.weight / (2.0 * np.pi * eps) ** 1.5
    return WaveField(grid, eps, ens.t, psi)
