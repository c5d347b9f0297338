"""Four-wave resonance structure of the discrete dispersion omega_k = 2 sin(pi k/N).

A 2->2 quartet (k, l) -> (m, s) is resonant when momentum is conserved
modulo N and the frequency mismatch omega_k + omega_l - omega_m - omega_s
vanishes. Without umklapp (offset 0) the mismatch factors as

    4 sin(pi(x+y)/2) sin(pi(x-z)/2) sin(pi(y-z)/2),   x = k/N etc.,

so only the trivial pairings {m,s} = {k,l} survive; genuine solutions need a
+-N momentum offset and lie on two analytic branches z(x, y).
"""

from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from . import _kernels
from .spectral import linear_dispersion

KIND_TRIVIAL = "trivial"
KIND_UMKLAPP_PLUS = "umklapp_plus"
KIND_UMKLAPP_MINUS = "umklapp_minus"


@dataclass(frozen=True)
class ResonanceQuartet:
    """One exact quartet with its momentum-offset class and float residual."""
    k: int
    l: int
    m: int
    s: int
    kind: str
    residual: float


@dataclass(frozen=True)
class ScanReport:
    """Outcome of an exhaustive resonance scan for one interaction arity."""
    n: int
    arity: str
    offsets: tuple
    candidates: int
    exact_count: int
    min_residual: float
    argmin: tuple
    continuum_min_gap: Optional[float]


class PeriodicDelta:
    """Kronecker delta on the ring: the index sum vanishes modulo N.

    arity selects which signed combination is constrained:
      d22: k + l - m - s, offsets {-N, 0, +N}
      d31: k + l + m - s, offsets {0, +N, +2N}
      d40: k + l + m + s, offsets {+N, +2N, +3N}
    """

    _COMBOS = {
        "d22": ((1, 1, -1, -1), (-1, 0, 1)),
        "d31": ((1, 1, 1, -1), (0, 1, 2)),
        "d40": ((1, 1, 1, 1), (1, 2, 3)),
    }

    def __init__(self, arity):
        if arity not in self._COMBOS:
            raise ValueError("arity must be one of %s" % sorted(self._COMBOS))
        self.arity = arity

    def offsets(self, n):
        signs, mults = self._COMBOS[self.arity]
        return tuple(j * n for j in mults)

    def __call__(self, k, l, m, s, n):
        signs, mults = self._COMBOS[self.arity]
        total = (signs[0] * np.asarray(k) + signs[1] * np.asarray(l)
                 + signs[2] * np.asarray(m) + signs[3] * np.asarray(s))
        hit = np.zeros(np.shape(total), dtype=bool)
        for j in mults:
            hit |= total == j * n
        return hit


def delta22(k, l, m, s, n):
    return PeriodicDelta("d22")(k, l, m, s, n)


def delta31(k, l, m, s, n):
    return PeriodicDelta("d31")(k, l, m, s, n)


def delta40(k, l, m, s, n):
    return PeriodicDelta("d40")(k, l, m, s, n)


def nontrivial_branches(x, y):
    """Rescaled outgoing wavenumbers z in (0, 1) resonant with (x, y).

    Solves sin(pi z - pi(x+y)/2) = tan(pi(x+y)/2) cos(pi(x-y)/2) together
    with the umklapp momentum rule v = x + y -+ 1 - z; a z value is kept only
    if one of the two partners lies in (0, 1). When the right-hand side
    exceeds 1 in modulus there is no resonance and the tuple is empty.
    """
    if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
        raise ValueError("x and y must lie in (0, 1)")
    sigma = x + y
    c = np.cos(0.5 * np.pi * sigma)
    if c == 0.0:
        return ()
    a = np.tan(0.5 * np.pi * sigma) * np.cos(0.5 * np.pi * (x - y))
    # tangency |a| = 1 is a real double root; tolerate float noise in tan*cos
    if np.abs(a) > 1.0 + 1e-12:
        return ()
    asn = np.arcsin(np.clip(a, -1.0, 1.0)) / np.pi
    roots = []
    for base in (0.5 * sigma + asn, 0.5 * sigma + 1.0 - asn):
        for j in (-2.0, 0.0, 2.0):
            z = base + j
            if 0.0 < z < 1.0:
                vm = sigma - 1.0 - z
                vp = sigma + 1.0 - z
                if 0.0 < vm < 1.0 or 0.0 < vp < 1.0:
                    roots.append(float(z))
    return tuple(sorted(set(roots)))


def momentum_partner(x, y, z):
    """The fourth rescaled wavenumber of an umklapp quartet containing z."""
    for v in (x + y - 1.0 - z, x + y + 1.0 - z):
        if 0.0 < v < 1.0:
            return v
    raise ValueError("no umklapp partner in (0, 1) for z = %g" % z)


def _mismatch22(n, k, l, m, s):
    om = linear_dispersion(n)
    return om[k] + om[l] - om[m] - om[s]


def exact_quartets(n, tol=1e-9):
    """All ordered exact 2->2 quartets (k, l) -> (m, s), nontrivial only.

    A float scan flags candidates with |mismatch| < tol; each candidate is
    then recomputed with 60-digit arithmetic and kept only if the mismatch is
    below 1e-40, so near-misses cannot slip in. Trivial pairings
    {m, s} = {k, l} are excluded. Results are sorted by (k, l, m, s).
    """
    om = linear_dispersion(n)
    idx = np.arange(1, n)
    lg, mg = np.meshgrid(idx, idx, indexing="ij")
    found = []
    for k in range(1, n):
        for off, kind in ((-n, KIND_UMKLAPP_MINUS), (0, KIND_TRIVIAL),
                          (n, KIND_UMKLAPP_PLUS)):
            sg = k + lg - mg - off
            valid = (sg >= 1) & (sg <= n - 1)
            if not np.any(valid):
                continue
            sc = np.where(valid, sg, 1)
            trivial = ((mg == k) & (sc == lg)) | ((mg == lg) & (sc == k))
            res = np.abs(om[k] + om[lg] - om[mg] - om[sc])
            hit = valid & ~trivial & (res < tol)
            for l, m in zip(lg[hit], mg[hit]):
                s = k + l - m - off
                found.append((int(k), int(l), int(m), int(s), kind,
                              float(np.abs(om[k] + om[l] - om[m] - om[s]))))
    out = []
    with mpmath.workdps(60):
        pi_n = mpmath.pi / n
        for k, l, m, s, kind, res in sorted(found):
            hi = abs(2 * (mpmath.sin(pi_n * k) + mpmath.sin(pi_n * l)
                          - mpmath.sin(pi_n * m) - mpmath.sin(pi_n * s)))
            if hi < mpmath.mpf("1e-40"):
                out.append(ResonanceQuartet(k, l, m, s, kind, res))
    return out


def _continuum_3to1_gap(samples=100000, seed=20260815):
    rng = np.random.default_rng(seed)
    x, y, z = rng.uniform(0.0, 1.0, (3, samples))
    total = x + y + z
    lhs = np.sin(np.pi * x) + np.sin(np.pi * y) + np.sin(np.pi * z)
    gap = np.inf
    for j in (0.0, 1.0, 2.0):
        v = total - j
        ok = (v > 0.0) & (v < 1.0)
        if np.any(ok):
            gap = min(gap, np.min(lhs[ok] - np.sin(np.pi * v[ok])))
    return float(gap)


def verify_no_3to1(n, tol=1e-9):
    """Exhaustive 3->1 scan: no quartet satisfies both conservation laws.

    Checks every (k, l, m) with s = k + l + m - offset on the ring and
    reports the minimum |omega_k + omega_l + omega_m - omega_s| along with a
    sampled lower bound on the continuum gap (subadditivity of sin on [0, pi]
    makes the mismatch strictly positive there).
    """
    om = linear_dispersion(n)
    idx = np.arange(1, n)
    lg, mg = np.meshgrid(idx, idx, indexing="ij")
    best = np.inf
    arg = None
    candidates = 0
    for k in range(1, n):
        for off in (0, n, 2 * n):
            sg = k + lg + mg - off
            valid = (sg >= 1) & (sg <= n - 1)
            if not np.any(valid):
                continue
            sc = np.where(valid, sg, 1)
            res = np.abs(om[k] + om[lg] + om[mg] - om[sc])
            res = np.where(valid, res, np.inf)
            candidates += int(np.count_nonzero(res < tol))
            i = np.argmin(res)
            if res.flat[i] < best:
                best = float(res.flat[i])
                arg = (k, int(lg.flat[i]), int(mg.flat[i]),
                       int(sc.flat[i]), off)
    return ScanReport(n=n, arity="d31", offsets=(0, n, 2 * n),
                      candidates=candidates, exact_count=0,
                      min_residual=best, argmin=arg,
                      continuum_min_gap=_continuum_3to1_gap())


def verify_no_4to0(n, tol=1e-9):
    """4->0 scan: the frequency sum of four waves can never vanish.

    All omega_k are positive for k = 1..N-1, so the minimum of the sum over
    momentum-conserving quartets bounds the mismatch away from zero.
    """
    om = linear_dispersion(n)
    idx = np.arange(1, n)
    lg, mg = np.meshgrid(idx, idx, indexing="ij")
    best = np.inf
    arg = None
    candidates = 0
    for k in range(1, n):
        for off in (n, 2 * n, 3 * n):
            sg = off - (k + lg + mg)
            valid = (sg >= 1) & (sg <= n - 1)
            if not np.any(valid):
                continue
            sc = np.where(valid, sg, 1)
            res = om[k] + om[lg] + om[mg] + om[sc]
            res = np.where(valid, res, np.inf)
            candidates += int(np.count_nonzero(res < tol))
            i = np.argmin(res)
            if res.flat[i] < best:
                best = float(res.flat[i])
                arg = (k, int(lg.flat[i]), int(mg.flat[i]),
                       int(sc.flat[i]), off)
    return ScanReport(n=n, arity="d40", offsets=(n, 2 * n, 3 * n),
                      candidates=candidates, exact_count=0,
                      min_residual=best, argmin=arg, continuum_min_gap=None)


def quartet_time_average(ak_series, k, sample_dt=None, min_span=None,
                         chunk=4096):
    """|< conj(a_k) conj(a_l) a_m a_s >| over the (l, m) grid, s fixed by momentum.

    s = (k + l - m) mod N; cells with s = 0 (zero-mode slot) are left at
    zero, as are the l = 0 row and m = 0 column. Pass sample_dt and min_span
    to enforce a minimum averaging window; off-resonant cells only decay to
    the noise floor once the window covers many beat periods.
    """
    nsamp, n = ak_series.shape
    if min_span is not None:
        if sample_dt is None:
            raise ValueError("min_span requires sample_dt")
        if nsamp * sample_dt < min_span:
            raise ValueError(
                "series spans %.3g time units, below the required %.3g"
                % (nsamp * sample_dt, min_span))
    acc = np.zeros((n, n), dtype=complex)
    for lo in range(0, nsamp, chunk):
        block = np.ascontiguousarray(ak_series[lo:lo + chunk])
        _kernels.quartet_accumulate(block, int(k), acc)
    return np.abs(acc) / nsamp


def resonance_mask(n, k, width=2.0):
    """Cells of the (l, m) grid within `width` of an analytic resonance curve.

    Marks the two trivial lines m = k and m = l and, for every l, the
    nontrivial branch points z(x, y) and their umklapp partners scaled back
    to mode numbers. Used to localize where a measured quartet average is
    allowed to concentrate.
    """
    mask = np.zeros((n, n), dtype=bool)
    m_idx = np.arange(n)
    x = k / n
    for l in range(1, n):
        targets = [float(k), float(l)]
        for z in nontrivial_branches(x, l / n):
            targets.append(n * z)
            targets.append(n * momentum_partner(x, l / n, z))
        for tgt in targets:
            mask[l] |= np.abs(m_idx - tgt) <= width
    mask[:, 0] = False
    mask[0, :] = False
    return mask
