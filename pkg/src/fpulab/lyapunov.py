"""Largest Lyapunov exponent of the chain and of the logistic map.

The chain estimate follows the tangent-vector method: evolve the variational
equations

    d(delta)/dt = eps
    d(eps_j)/dt = (delta_{j+1} - 2 delta_j + delta_{j-1})
                  - 3 beta [ (q_j - q_{j+1})^2 (delta_j - delta_{j+1})
                           + (q_j - q_{j-1})^2 (delta_j - delta_{j-1}) ]

along the trajectory, log the norm growth over each interval, rescale back,
and average the per-interval rates. The tangent is seeded orthogonal to the
two conserved directions (uniform translation of q, uniform boost of p),
whose marginal t-growth would otherwise mask a vanishing exponent.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chain import random_thermal_init
from .integrators import YOSHIDA6


@dataclass
class TangentState:
    """Tangent-space displacement (delta, eps) with its reference norm."""
    delta: np.ndarray
    eps: np.ndarray
    norm0: float

    def __post_init__(self):
        self.delta = np.ascontiguousarray(self.delta, dtype=np.float64)
        self.eps = np.ascontiguousarray(self.eps, dtype=np.float64)

    def norm(self):
        return float(np.sqrt(np.sum(self.delta ** 2) + np.sum(self.eps ** 2)))

    def renormalized(self):
        """Same direction, norm reset to norm0."""
        scale = self.norm0 / self.norm()
        return TangentState(self.delta * scale, self.eps * scale, self.norm0)


@dataclass
class LyapunovEstimate:
    """Per-interval stretching rates and their running and final means."""
    h_s: np.ndarray
    h_partial: np.ndarray
    h: float
    se: float
    renorm_interval: float
    resets: int


def tangent_step(state, tangent, dt, beta, scheme=YOSHIDA6):
    """Advance base state and tangent together by one dt.

    The base moves with two half-dt composition steps; the tangent takes one
    RK4 step of the variational equations with the base frozen at t, t+dt/2,
    t+dt for the stages. Returns (new_state, new_tangent).
    """
    out = state.copy()
    delta = tangent.delta.copy()
    eps = tangent.eps.copy()
    _kernels.tangent_rk4_span(out.q, out.p, delta, eps, float(beta),
                              float(dt), 1, scheme.c, scheme.d)
    out.t = state.t + dt
    return out, TangentState(delta, eps, tangent.norm0)


def seed_tangent(n, seed, d0=1e-10):
    """Random unit tangent of norm d0 with both zero modes projected out."""
    rng = np.random.default_rng(seed)
    delta = rng.standard_normal(n)
    eps = rng.standard_normal(n)
    delta -= delta.mean()
    eps -= eps.mean()
    tangent = TangentState(delta, eps, d0)
    return tangent.renormalized()


def lyapunov_fpu(params, seed, renorm_interval=1.0, resets=1000, d0=1e-10,
                 dt=0.02, warmup_time=100.0, scheme=YOSHIDA6):
    """Largest Lyapunov exponent of a thermalized chain.

    Runs `resets` stretch-and-rescale intervals of length renorm_interval
    after discarding warmup_time of transient. The estimate is the plain
    mean of the interval rates; the quoted standard error treats intervals
    as independent, which the running mean h_partial lets the caller judge.
    """
    if resets < 100:
        raise ValueError("resets must be at least 100 for a stable mean")
    state = random_thermal_init(params, seed)
    q = state.q.copy()
    p = state.p.copy()
    if warmup_time > 0:
        _kernels.composition_steps(q, p, params.beta, dt,
                                   int(round(warmup_time / dt)),
                                   scheme.c, scheme.d)
    tangent = seed_tangent(params.n, seed + 1, d0)
    delta = tangent.delta.copy()
    eps = tangent.eps.copy()
    steps = max(1, int(round(renorm_interval / dt)))
    h_s = np.empty(resets)
    bad = _kernels.lyapunov_loop(q, p, delta, eps, params.beta, dt, steps,
                                 resets, d0, scheme.c, scheme.d, h_s)
    if bad:
        raise FloatingPointError("tangent dynamics left the representable "
                                 "range at reset %d" % bad)
    h_partial = np.cumsum(h_s) / np.arange(1, resets + 1)
    h = float(np.mean(h_s))
    se = float(np.std(h_s, ddof=1) / np.sqrt(resets))
    return LyapunovEstimate(h_s=h_s, h_partial=h_partial, h=h, se=se,
                            renorm_interval=steps * dt, resets=resets)


def lyapunov_map(lam, x0=0.6180339887498949, iterations=1000000,
                 burn_in=1000):
    """Lyapunov exponent of the logistic map f(x) = 4 lam x (1 - x).

    Plain orbit average of ln |f'(x)|; exact hits of the critical point
    x = 1/2 are nudged by 1e-15. lam = 1 gives ln 2; small lam gives the
    large negative rate of the attracting fixed point.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("lam must lie in (0, 1]")
    if not 0.0 < x0 < 1.0:
        raise ValueError("x0 must lie in (0, 1)")
    return float(_kernels.logistic_lyapunov_loop(float(lam), float(x0),
                                                 int(iterations),
                                                 int(burn_in)))
