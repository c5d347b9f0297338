"""Symplectic composition integrators for the chain.

The default scheme is the 8-stage order-6 solution A table. Coefficients are
stored to the printed 15 decimals; both families sum to 1 to ~2e-15 and the
trailing kick coefficient is exactly zero, so a step costs 7 force calls.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chain import ChainState


@dataclass(frozen=True)
class CompositionScheme:
    """Drift (c) and kick (d) coefficient tables of a splitting method."""
    c: np.ndarray
    d: np.ndarray
    order: int

    def __post_init__(self):
        object.__setattr__(self, "c", np.ascontiguousarray(self.c, dtype=np.float64))
        object.__setattr__(self, "d", np.ascontiguousarray(self.d, dtype=np.float64))
        if self.c.shape != self.d.shape:
            raise ValueError("coefficient tables must have equal length")


YOSHIDA6 = CompositionScheme(
    c=np.array([
        0.392256805238780,
        0.510043411918458,
        -0.471053385409757,
        0.068753168252518,
        0.068753168252518,
        -0.471053385409757,
        0.510043411918458,
        0.392256805238780,
    ]),
    d=np.array([
        0.784513610477560,
        0.235573213359357,
        -1.177679984178870,
        1.315186320683906,
        -1.177679984178870,
        0.235573213359357,
        0.784513610477560,
        0.0,
    ]),
    order=6,
)


class BlowUpError(FloatingPointError):
    """Raised when the trajectory leaves the representable range."""

    def __init__(self, step, t):
        self.step = step
        self.t = t
        super().__init__(
            "numerical blow-up: non-finite state at step %d (t = %g); "
            "reduce dt or the energy" % (step, t))


def step(state, dt, beta, scheme=YOSHIDA6):
    """One composition step of size dt. Returns a new ChainState."""
    out = state.copy()
    _kernels.composition_steps(out.q, out.p, float(beta), float(dt), 1,
                               scheme.c, scheme.d)
    out.t = state.t + dt
    if not (np.all(np.isfinite(out.q)) and np.all(np.isfinite(out.p))):
        raise BlowUpError(1, out.t)
    return out


def integrate(state, dt, steps, sample_every, beta, scheme=YOSHIDA6):
    """Integrate `steps` steps, returning snapshots every `sample_every` steps.

    The result holds floor(steps/sample_every) + 1 states and includes the
    initial one; any trailing partial block is still integrated but not
    sampled. The input state is not modified.
    """
    if steps < 0 or sample_every <= 0:
        raise ValueError("steps must be >= 0 and sample_every positive")
    nblocks = steps // sample_every
    q = state.q.copy()
    p = state.p.copy()
    out_q = np.empty((nblocks, state.n))
    out_p = np.empty((nblocks, state.n))
    bad = _kernels.composition_run_sampled(q, p, float(beta), float(dt),
                                           steps, sample_every,
                                           scheme.c, scheme.d, out_q, out_p)
    if bad:
        raise BlowUpError(bad, state.t + bad * dt)
    snaps = [state.copy()]
    for b in range(nblocks):
        tb = state.t + (b + 1) * sample_every * dt
        snaps.append(ChainState(out_q[b], out_p[b], tb))
    return snaps


def integrate_raw(q, p, dt, steps, sample_every, beta, scheme=YOSHIDA6):
    """Array-in, array-out trajectory sampler used by the measurement code.

    Mutates q, p to the final state and returns (qs, ps) matrices of shape
    [floor(steps/sample_every), n] holding the sampled rows (the initial
    state is not included). Raises BlowUpError like integrate().
    """
    nblocks = steps // sample_every
    out_q = np.empty((nblocks, q.shape[0]))
    out_p = np.empty((nblocks, q.shape[0]))
    bad = _kernels.composition_run_sampled(q, p, float(beta), float(dt),
                                           steps, sample_every,
                                           scheme.c, scheme.d, out_q, out_p)
    if bad:
        raise BlowUpError(bad, bad * dt)
    return out_q, out_p
