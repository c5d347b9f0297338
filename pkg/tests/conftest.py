"""Shared fixtures: thermalized trajectories reused across test modules.

Everything here is deterministic (fixed seeds); the expensive trajectories
are session-scoped so the statistical suites and the acceptance gate share
one integration each.
"""

import numpy as np
import pytest

from fpulab import ModelParams, random_thermal_init
from fpulab.integrators import YOSHIDA6, integrate_raw
from fpulab import _kernels


def thermalized_trajectory(params, seed, dt, warmup_steps, samples,
                           sample_every, warmup_dt=None):
    """Warm up from a random state, then sample a stationary segment."""
    state = random_thermal_init(params, seed)
    q, p = state.q.copy(), state.p.copy()
    _kernels.composition_steps(q, p, float(params.beta),
                               float(warmup_dt if warmup_dt else dt),
                               int(warmup_steps), YOSHIDA6.c, YOSHIDA6.d)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise RuntimeError("warmup diverged; check dt")
    qs, ps = integrate_raw(q, p, dt, samples * sample_every, sample_every,
                           params.beta)
    return qs, ps


@pytest.fixture(scope="session")
def equilibrium_run():
    """N=128, beta=0.5, E=50: warmup 1e5 steps of dt=0.1, then 8192
    snapshots 0.1 apart. Geometry of the eta-measurement benchmark."""
    params = ModelParams(128, 0.5, 50.0)
    qs, ps = thermalized_trajectory(params, seed=20260815, dt=0.1,
                                    warmup_steps=100_000, samples=8192,
                                    sample_every=1)
    return params, qs, ps, 0.1


@pytest.fixture(scope="session")
def rj_run():
    """N=256, beta=0.5, E=100: long sparse segment for one- and two-mode
    equilibrium statistics. Mode energies decorrelate on the collision
    time scale (thousands of time units for the slowest modes), so the
    window spans 1.3e6 units with snapshots 40 apart."""
    params = ModelParams(256, 0.5, 100.0)
    qs, ps = thermalized_trajectory(params, seed=20260815, dt=0.1,
                                    warmup_steps=200_000, samples=32768,
                                    sample_every=400)
    return params, qs, ps, 40.0


@pytest.fixture(scope="session")
def harmonic_run():
    """N=32, beta=0: exactly integrable reference trajectory."""
    params = ModelParams(32, 0.0, 8.0)
    qs, ps = thermalized_trajectory(params, seed=11, dt=0.1,
                                    warmup_steps=2000, samples=4096,
                                    sample_every=1)
    return params, qs, ps, 0.1
