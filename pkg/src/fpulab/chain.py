"""State, energetics, and initial conditions for the periodic beta-FPU chain.

H = sum_j [ p_j^2/2 + (q_j - q_{j+1})^2/2 + (beta/4)(q_j - q_{j+1})^4 ]

with q_{N} = q_0. Site indices are 0-based throughout; bond j is the pair
(j, j+1 mod N).
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class ModelParams:
    """Chain size, quartic coupling, and total energy of a run."""
    n: int
    beta: float
    energy: float
    edensity: float = field(init=False)

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError("n must be even and at least 4")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.energy <= 0:
            raise ValueError("energy must be positive")
        object.__setattr__(self, "edensity", self.energy / self.n)


@dataclass
class ChainState:
    """Phase-space point (q, p) at time t."""
    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.q = np.ascontiguousarray(self.q, dtype=np.float64)
        self.p = np.ascontiguousarray(self.p, dtype=np.float64)
        if self.q.ndim != 1 or self.q.shape != self.p.shape:
            raise ValueError("q and p must be 1-d arrays of equal length")

    @property
    def n(self):
        return self.q.shape[0]

    def copy(self):
        return ChainState(self.q.copy(), self.p.copy(), self.t)


@dataclass
class SiteEnergy:
    """Per-site energy split g_j; sums to the total energy."""
    g: np.ndarray


def bond_differences(q):
    """y_j = q_j - q_{j-1} (left bond), periodic."""
    return q - np.roll(q, 1)


def total_energy(state, params):
    """Total Hamiltonian of the state."""
    y = state.q - np.roll(state.q, -1)  # q_j - q_{j+1}
    return float(0.5 * np.sum(state.p ** 2)
                 + 0.5 * np.sum(y ** 2)
                 + 0.25 * params.beta * np.sum(y ** 4))


def forces(q, beta):
    """- dH/dq_j for the periodic chain."""
    q = np.ascontiguousarray(q, dtype=np.float64)
    out = np.empty_like(q)
    _kernels.fpu_forces(q, float(beta), out)
    return out


def site_energies(state, params):
    """Per-site split of H: half of each bond energy goes to each endpoint.

    g_j = p_j^2/2 + (1/4)[(q_j-q_{j+1})^2 + (q_{j-1}-q_j)^2]
        + (beta/8)[(q_j-q_{j+1})^4 + (q_{j-1}-q_j)^4]
    """
    yr = state.q - np.roll(state.q, -1)  # bond to the right of j
    yl = np.roll(yr, 1)                  # bond to the left of j
    g = (0.5 * state.p ** 2
         + 0.25 * (yr ** 2 + yl ** 2)
         + 0.125 * params.beta * (yr ** 4 + yl ** 4))
    return SiteEnergy(g=g)


def localization(state, params):
    """L = N * sum g_j^2 / (sum g_j)^2. 1 for uniform energy, N for one site."""
    g = site_energies(state, params).g
    total = np.sum(g)
    if total <= 0.0:
        raise ValueError("zero-energy state has undefined localization")
    return float(state.n * np.sum(g ** 2) / total ** 2)


def _rescaled_energy(q, p, s, beta):
    y = q - np.roll(q, -1)
    return (0.5 * s ** 2 * np.sum(p ** 2)
            + 0.5 * s ** 2 * np.sum(y ** 2)
            + 0.25 * beta * s ** 4 * np.sum(y ** 4))


def random_thermal_init(params, seed, pmax=1.0, qmax=1.0):
    """Random state with zero total momentum, scaled to the target energy.

    Draws q and p uniformly, subtracts the means (this pins both zero modes),
    then rescales (q, p) jointly by one factor s found by bisection, so the
    relative shape of the draw is preserved. Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    for _ in range(16):
        q = rng.uniform(-qmax, qmax, params.n)
        p = rng.uniform(-pmax, pmax, params.n)
        q -= q.mean()
        p -= p.mean()
        e1 = _rescaled_energy(q, p, 1.0, params.beta)
        if e1 > 0.0:
            break
    else:
        raise ValueError("degenerate draw: zero fluctuation after centering")

    # H(s) = s^2 A + s^4 B is increasing in s, so bracket and bisect.
    lo, hi = 0.0, 1.0
    while _rescaled_energy(q, p, hi, params.beta) < params.energy:
        hi *= 2.0
        if hi > 1e12:
            raise ValueError("failed to bracket the energy rescaling")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _rescaled_energy(q, p, mid, params.beta) < params.energy:
            lo = mid
        else:
            hi = mid
        if (hi - lo) <= 1e-14 * hi:
            break
    s = 0.5 * (lo + hi)
    q *= s
    p *= s
    # polish with one Newton step on H(s)=E in the residual scale factor
    state = ChainState(q, p, 0.0)
    h = total_energy(state, params)
    y = q - np.roll(q, -1)
    a2 = 0.5 * np.sum(p ** 2) + 0.5 * np.sum(y ** 2)
    b4 = 0.25 * params.beta * np.sum(y ** 4)
    for _ in range(8):
        if abs(h - params.energy) <= 1e-12 * params.energy:
            break
        dh_ds = 2.0 * a2 + 4.0 * b4
        ds = (params.energy - h) / dh_ds
        q *= 1.0 + ds
        p *= 1.0 + ds
        state = ChainState(q, p, 0.0)
        h = total_energy(state, params)
        y = q - np.roll(q, -1)
        a2 = 0.5 * np.sum(p ** 2) + 0.5 * np.sum(y ** 2)
        b4 = 0.25 * params.beta * np.sum(y ** 4)
    if abs(h - params.energy) > 1e-10 * params.energy:
        raise ValueError("energy rescaling did not converge")
    return state


def pi_mode_energy(n, beta, amplitude):
    """Energy of the zig-zag pattern q_j = (-1)^j a: N(2 a^2 + 4 beta a^4)."""
    return n * (2.0 * amplitude ** 2 + 4.0 * beta * amplitude ** 4)


def pi_mode_init(params, amplitude, noise_amp=1e-14, seed=0):
    """Zig-zag (zone-boundary) initial condition with a tiny random seed noise.

    q_j = (-1)^j * amplitude plus uniform noise of scale noise_amp, p = 0.
    The noise breaks the exact symmetry so the modulational instability can
    develop. Requires even n (the pattern is incommensurate otherwise).
    """
    if params.n % 2 != 0:
        raise ValueError("pi-mode requires an even number of sites")
    rng = np.random.default_rng(seed)
    signs = np.where(np.arange(params.n) % 2 == 0, 1.0, -1.0)
    q = amplitude * signs
    if noise_amp != 0.0:
        noise = rng.uniform(-noise_amp, noise_amp, params.n)
        q = q + noise - noise.mean()
    p = np.zeros(params.n)
    return ChainState(q, p, 0.0)
