"""Kinetic prediction of single-mode correlation decay and line shapes.

For mode k in equilibrium the normalized correlation C_k(t)/C_k(0) of the
renormalized amplitude follows, at second order in the coupling,

    ln(C_k(t)/C_k(0)) = (9 beta^2 theta^2 / (8 N^2 eta^6)) * omega_k *
        sum'_{l,m,s} (omega_m + omega_s - omega_l) Delta^{kl}_{ms}
        * (exp(i W t) - 1 - i W t) / W^2,

where Delta is the periodic momentum delta (umklapp offsets optional), the
omegas are bare, and W is the renormalized frequency mismatch
eta (omega_k + omega_l - omega_m - omega_s) (or the bare one with
kernel="bare"). The primed sum skips the self terms m = k and s = k and the
exactly resonant quartets, whose secular growth belongs to the resonance
manifold, not to the linewidth.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spectral import linear_dispersion, spectrum_from_correlation

KERNELS = ("renormalized", "bare")


@dataclass
class CorrelationPrediction:
    """Predicted C_k(t)/C_k(0) on a time grid, with its parameter block."""
    k: int
    t_grid: np.ndarray
    c_over_c0: np.ndarray
    umklapp: bool
    kernel: str
    n: int
    beta: float
    edensity: float
    theta: float
    eta: float
    terms: int
    excluded: int


@dataclass
class ModeSpectrum:
    """One-mode line shape over absolute angular frequency."""
    k: int
    omega: np.ndarray
    power: np.ndarray


def _collect_terms(k, n, umklapp, exclusion_tol):
    """Amplitude and bare-mismatch arrays of the primed collision sum."""
    om = linear_dispersion(n)
    idx = np.arange(1, n)
    lg, mg = np.meshgrid(idx, idx, indexing="ij")
    offsets = (-n, 0, n) if umklapp else (0,)
    amps = []
    mism = []
    excluded = 0
    for off in offsets:
        sg = k + lg - mg - off
        valid = (sg >= 1) & (sg <= n - 1)
        sc = np.where(valid, sg, 1)
        keep = valid & (mg != k) & (sc != k)
        res = om[k] + om[lg] - om[mg] - om[sc]
        trivial = ((mg == k) & (sc == lg)) | ((mg == lg) & (sc == k))
        exact = keep & ~trivial & (np.abs(res) < exclusion_tol)
        excluded += int(np.count_nonzero(exact))
        keep &= ~exact
        amps.append((om[mg] + om[sc] - om[lg])[keep])
        mism.append(res[keep])
    return np.concatenate(amps), np.concatenate(mism), excluded


def _term_setup(k, n, thermo, umklapp, kernel, exclusion_tol):
    """(amplitudes, kernel frequencies, prefactor, excluded) for one mode."""
    if kernel not in KERNELS:
        raise ValueError("kernel must be one of %s" % (KERNELS,))
    if not 1 <= k <= n - 1:
        raise ValueError("k must be in 1..N-1")
    amp, mism, excluded = _collect_terms(k, n, umklapp, exclusion_tol)
    freq = thermo.eta * mism if kernel == "renormalized" else mism
    pref = (9.0 * thermo.beta ** 2 * thermo.theta ** 2
            / (8.0 * n ** 2 * thermo.eta ** 6)) * 2.0 * np.sin(np.pi * k / n)
    return amp, freq, pref, excluded


def _ln_ratio_at(amp, freq, pref, times):
    """ln(C/C0) at arbitrary times; work tiled so no huge outer products."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.zeros(times.size, dtype=complex)
    small = np.abs(freq) < 1e-12
    if np.any(small):
        out += np.sum(amp[small]) * (-0.5 * times ** 2)
    for tlo in range(0, times.size, 1024):
        ts = times[tlo:tlo + 1024]
        for lo in range(0, amp.size, 8192):
            a = amp[lo:lo + 8192]
            w = freq[lo:lo + 8192]
            sm = small[lo:lo + 8192]
            a, w = a[~sm], w[~sm]
            wt = np.outer(ts, w)
            out[tlo:tlo + 1024] += (np.exp(1j * wt) - 1.0 - 1j * wt).dot(a / w ** 2)
    return pref * out


def _ln_ratio_uniform(amp, freq, pref, t0, step, npts):
    """ln(C/C0) on the uniform grid t0 + step*arange(npts), compiled path."""
    out_re = np.empty(npts)
    out_im = np.empty(npts)
    _kernels.oscillatory_sum(amp, freq, 1e-12, float(t0), float(step),
                             int(npts), out_re, out_im)
    return pref * (out_re + 1j * out_im)


def predict_correlation(k, t_grid, n, thermo, umklapp=True,
                        kernel="renormalized", exclusion_tol=1e-9):
    """Closure prediction of C_k(t)/C_k(0) for one mode.

    thermo is a ThermoSolution fixing (beta, edensity, theta, eta). With
    umklapp=False the momentum delta keeps only the offset-0 terms. The
    kernel switch selects whether the oscillatory denominators use the
    renormalized mismatch (default) or the bare one.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    amp, freq, pref, excluded = _term_setup(k, n, thermo, umklapp, kernel,
                                            exclusion_tol)
    steps = np.diff(t_grid)
    if steps.size and np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        ln_ratio = _ln_ratio_uniform(amp, freq, pref, t_grid[0], steps[0],
                                     t_grid.size)
    else:
        ln_ratio = _ln_ratio_at(amp, freq, pref, t_grid)
    return CorrelationPrediction(
        k=int(k), t_grid=t_grid, c_over_c0=np.exp(ln_ratio),
        umklapp=bool(umklapp), kernel=kernel, n=int(n),
        beta=thermo.beta, edensity=thermo.edensity, theta=thermo.theta,
        eta=thermo.eta, terms=int(amp.size), excluded=excluded)


def default_time_grid(n, eta, periods=512, per_period=64):
    """Uniform grid covering `periods` fundamental periods t1 = 2 pi / wt_1."""
    t1 = 2.0 * np.pi / (eta * 2.0 * np.sin(np.pi / n))
    npts = periods * per_period
    return np.linspace(0.0, periods * t1, npts + 1)


def predict_spectrum(prediction):
    """Line shape of mode k: transform of the predicted correlation.

    The correlation is extended to t < 0 by conjugate symmetry and
    transformed with the e^{+i omega t} convention; the grid is then shifted
    by the renormalized mode frequency, where the ridge of the full
    (unfactored) correlation sits. Requires a uniform time grid whose horizon
    lets |C/C0| decay below 1e-3, otherwise the truncated transform would
    ring.
    """
    t = prediction.t_grid
    steps = np.diff(t)
    if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("prediction must live on a uniform time grid")
    tail = np.abs(prediction.c_over_c0[-1])
    if tail > 1e-3:
        raise ValueError(
            "correlation only decayed to %.3g; extend the horizon before "
            "transforming" % tail)
    omega_rel, power = spectrum_from_correlation(prediction.c_over_c0,
                                                 float(steps[0]))
    om_k = prediction.eta * 2.0 * np.sin(np.pi * prediction.k / prediction.n)
    return ModeSpectrum(k=prediction.k, omega=omega_rel + om_k, power=power)


def spectral_width(power, omega):
    """Equivalent width W = (sum power * domega) / max power.

    A rectangle of width w returns w; a triangle of base b returns b/2.
    """
    power = np.asarray(power, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if power.shape != omega.shape or power.ndim != 1:
        raise ValueError("power and omega must be equal-length 1-d arrays")
    top = np.max(power)
    if top <= 0.0:
        raise ValueError("spectral width of a non-positive function is undefined")
    domega = np.diff(omega)
    if not np.allclose(domega, domega[0], rtol=1e-9, atol=0.0):
        raise ValueError("omega grid must be uniform")
    return float(np.sum(power) * domega[0] / top)


def correlation_time(prediction):
    """(tau_k, tau_k / t_tilde_k): e-folding time of |C/C0| by interpolation."""
    mag = np.abs(prediction.c_over_c0)
    target = 1.0 / np.e
    below = np.nonzero(mag <= target)[0]
    if below.size == 0 or below[0] == 0:
        raise ValueError(
            "|C/C0| never crossed 1/e (minimum %.4g); extend the horizon"
            % float(np.min(mag)))
    i = below[0]
    t0, t1 = prediction.t_grid[i - 1], prediction.t_grid[i]
    m0, m1 = mag[i - 1], mag[i]
    tau = t0 + (m0 - target) * (t1 - t0) / (m0 - m1)
    om_k = prediction.eta * 2.0 * np.sin(np.pi * prediction.k / prediction.n)
    t_tilde = 2.0 * np.pi / om_k
    return float(tau), float(tau / t_tilde)


def _first_crossing(magnitude, t_lo, target=np.exp(-1.0), growth=1.5,
                    max_probes=96):
    """First t with magnitude(t) <= target, assuming a decaying envelope.

    Walks a geometric ladder from t_lo, then scans the bracketing rung at
    fine resolution and interpolates. Small oscillations around the envelope
    are tolerated; a crossing entirely inside one rung that recovers before
    the next probe would be missed, which is acceptable for these
    monotonically widening decay laws.
    """
    probes = t_lo * growth ** np.arange(max_probes)
    lo = 0.0
    hi = None
    for j in range(0, max_probes, 8):
        ts = probes[j:j + 8]
        mags = magnitude(ts)
        drop = np.nonzero(mags <= target)[0]
        if drop.size:
            hi = ts[drop[0]]
            if drop[0] > 0:
                lo = ts[drop[0] - 1]
            break
        lo = ts[-1]
    if hi is None:
        raise ValueError(
            "|C/C0| never crossed %.4g by t = %.4g (reached %.4g)"
            % (target, probes[-1], float(mags[-1])))
    ts = np.linspace(lo, hi, 97)[1:]
    mags = magnitude(ts)
    i = int(np.nonzero(mags <= target)[0][0])
    t0 = lo if i == 0 else ts[i - 1]
    m0 = magnitude(np.array([t0]))[0] if i == 0 else mags[i - 1]
    return float(t0 + (m0 - target) * (ts[i] - t0) / (m0 - mags[i]))


def decay_time(k, n, thermo, umklapp=True, kernel="renormalized",
               exclusion_tol=1e-9):
    """(tau_k, tau_k / t_tilde_k) evaluated adaptively, with no dense grid.

    Equivalent to correlation_time on an unbounded grid: the closure is
    evaluated only at probe times, so slow modes cost no more than fast
    ones. Raises if the decay never reaches 1/e (for instance at beta = 0).
    """
    amp, freq, pref, _ = _term_setup(k, n, thermo, umklapp, kernel,
                                     exclusion_tol)
    om_k = thermo.eta * 2.0 * np.sin(np.pi * k / n)
    t_tilde = 2.0 * np.pi / om_k

    def magnitude(ts):
        return np.abs(np.exp(_ln_ratio_at(amp, freq, pref, ts)))

    tau = _first_crossing(magnitude, t_tilde / 8.0)
    return tau, tau / t_tilde


def predict_width(k, n, thermo, umklapp=True, kernel="renormalized",
                  exclusion_tol=1e-9, band_gammas=60.0, bins_per_gamma=10):
    """Equivalent width of the predicted line of mode k: (W, ModeSpectrum).

    The line shape is the transform of C_k(t)/C_k(0) on a frequency band of
    half-width band_gammas / tau_k around the line center. Collision terms
    whose kernel frequency exceeds the band split exactly into a frequency
    shift (-i t / omega), a constant (-1 / omega^2), and a bounded replica
    term e^{i omega t} / omega^2 whose spectral image lands outside the band
    and is dropped; the remaining slow terms are transformed on a time grid
    that resolves them. This keeps the grid size set by the linewidth, not
    by the fastest collision frequency.
    """
    amp, freq, pref, _ = _term_setup(k, n, thermo, umklapp, kernel,
                                     exclusion_tol)
    om_k = thermo.eta * 2.0 * np.sin(np.pi * k / n)
    t_tilde = 2.0 * np.pi / om_k

    def magnitude(ts):
        return np.abs(np.exp(_ln_ratio_at(amp, freq, pref, ts)))

    tau = _first_crossing(magnitude, t_tilde / 8.0)
    gamma = 1.0 / tau

    # line center: the out-of-band terms contribute a secular phase drift
    tiny = np.abs(freq) < 1e-12
    fast = (np.abs(freq) > (band_gammas + 4.0) * gamma) & ~tiny
    shift = -pref * np.sum(amp[fast] / freq[fast])
    offset = -pref * np.sum(amp[fast] / freq[fast] ** 2)

    t_end = _first_crossing(magnitude, 4.0 * tau, target=1e-4, growth=1.3)
    w_top = (band_gammas + 4.0) * gamma + abs(shift)
    dt = min(2.0 * np.pi / (16.0 * w_top), tau / 64.0)
    times = np.arange(0.0, t_end + dt, dt)
    g_slow = _ln_ratio_uniform(amp[~fast], freq[~fast], pref, 0.0, dt,
                               times.size)
    corr = np.exp(g_slow + 1j * shift * times + offset)

    nbins = int(round(band_gammas * bins_per_gamma))
    weights = np.full(times.size, dt)
    weights[0] = weights[-1] = 0.5 * dt
    wc = weights * corr
    center = shift
    for _ in range(2):
        om_rel = center + np.linspace(-band_gammas, band_gammas,
                                      2 * nbins + 1) * gamma
        power = np.zeros(om_rel.size)
        for lo in range(0, times.size, 8192):
            ph = np.outer(om_rel, times[lo:lo + 8192])
            power += 2.0 * np.real(np.exp(1j * ph).dot(wc[lo:lo + 8192]))
        peak = int(np.argmax(power))
        if nbins // 5 <= peak <= 2 * nbins - nbins // 5:
            break
        center = om_rel[peak]  # line drifted out of the provisional band
    width = spectral_width(power, om_rel)
    return width, ModeSpectrum(k=int(k), omega=om_rel + om_k, power=power)
