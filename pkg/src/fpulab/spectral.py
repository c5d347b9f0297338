"""Normal modes, renormalized wave amplitudes, and equilibrium spectra.

Mode convention: Q_k = N^{-1/2} sum_j q_j exp(+2 pi i k j / N), same for P_k,
so Q_{N-k} = conj(Q_k) for real fields and Parseval holds with no extra
factors. The bare dispersion is omega_k = 2 sin(pi k / N); the renormalized
one is omega_tilde_k = eta * omega_k. Renormalized amplitudes are

    a_k = (P_k - i omega_tilde_k Q_k) / sqrt(2 omega_tilde_k),  k = 1..N-1,

stored in full length-N arrays whose k = 0 slot is identically zero (both
zero modes are conserved and carry no oscillation).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
import scipy.signal

_WINDOWS = {"hann": "hann", "rect": "boxcar"}


def linear_dispersion(n):
    """Bare dispersion omega_k = 2 sin(pi k / N) for k = 0..N-1."""
    return 2.0 * np.sin(np.pi * np.arange(n) / n)


@dataclass
class FourierField:
    """Complex mode amplitudes (Q_k, P_k) of one chain state."""
    Qk: np.ndarray
    Pk: np.ndarray
    t: float = 0.0

    @property
    def n(self):
        return self.Qk.shape[0]


@dataclass
class WaveField:
    """Renormalized wave amplitudes a_k with their dispersion."""
    ak: np.ndarray
    omega_tilde: np.ndarray
    eta_used: float
    t: float = 0.0

    @property
    def n(self):
        return self.ak.shape[0]


@dataclass
class SpectralDensity:
    """Welch estimate of per-mode frequency content, one row per mode."""
    k_list: np.ndarray
    omega: np.ndarray
    power: np.ndarray
    sample_dt: float
    window: str
    segments: int


@dataclass
class ModeStatistics:
    """Time-averaged one- and two-mode moments with jackknife errors.

    Pair correlators couple k with N-k (the only pairing allowed by momentum
    conservation); aa is <a_k a_{N-k}> with no conjugation, so it vanishes in
    equilibrium while n_k = <|a_k|^2> carries the spectrum.
    """
    k: np.ndarray
    n_k: np.ndarray
    n_k_se: np.ndarray
    aa: np.ndarray
    aa_se: np.ndarray
    pp: np.ndarray
    pp_se: np.ndarray
    qq: np.ndarray
    qq_se: np.ndarray
    pq: np.ndarray
    pq_se: np.ndarray
    eta_used: float
    samples: int
    blocks: int


def to_fourier(state):
    """Mode amplitudes of a ChainState (unitary +i convention)."""
    n = state.n
    root = np.sqrt(n)
    return FourierField(Qk=root * np.fft.ifft(state.q),
                        Pk=root * np.fft.ifft(state.p),
                        t=state.t)


def from_fourier(fourier):
    """Inverse of to_fourier; imaginary round-off is discarded."""
    from .chain import ChainState
    n = fourier.n
    root = np.sqrt(n)
    q = np.fft.fft(fourier.Qk).real / root
    p = np.fft.fft(fourier.Pk).real / root
    return ChainState(q, p, fourier.t)


def to_waves(fourier, eta):
    """Renormalized amplitudes from mode amplitudes; slot k = 0 stays zero."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    n = fourier.n
    wt = eta * linear_dispersion(n)
    ak = np.zeros(n, dtype=complex)
    ak[1:] = (fourier.Pk[1:] - 1j * wt[1:] * fourier.Qk[1:]) / np.sqrt(2.0 * wt[1:])
    return WaveField(ak=ak, omega_tilde=wt, eta_used=float(eta), t=fourier.t)


def from_waves(wave):
    """Mode amplitudes from wave amplitudes (exact inverse of to_waves).

    P_k = sqrt(wt_k/2) (a_k + conj(a_{N-k})),
    Q_k = i (a_k - conj(a_{N-k})) / sqrt(2 wt_k).
    The zero-mode slots come back as zero; they are not part of the wave
    description.
    """
    n = wave.n
    wt = wave.omega_tilde
    a = wave.ak
    a_rev = np.conj(a[::-1])            # index k holds conj(a_{N-k}) for k>=1
    a_rev = np.roll(a_rev, 1)
    pk = np.zeros(n, dtype=complex)
    qk = np.zeros(n, dtype=complex)
    pk[1:] = np.sqrt(0.5 * wt[1:]) * (a[1:] + a_rev[1:])
    qk[1:] = 1j * (a[1:] - a_rev[1:]) / np.sqrt(2.0 * wt[1:])
    return FourierField(Qk=qk, Pk=pk, t=wave.t)


def bare_from_renormalized(wave):
    """Bare (eta = 1) amplitudes as a Bogoliubov mix of renormalized ones.

    a_k(bare) = (1/2)(sqrt(eta) + 1/sqrt(eta)) a_k
              + (1/2)(sqrt(eta) - 1/sqrt(eta)) conj(a_{N-k})
    """
    n = wave.n
    eta = wave.eta_used
    cp = 0.5 * (np.sqrt(eta) + 1.0 / np.sqrt(eta))
    cm = 0.5 * (np.sqrt(eta) - 1.0 / np.sqrt(eta))
    a = wave.ak
    a_rev = np.roll(np.conj(a[::-1]), 1)
    bare = np.zeros(n, dtype=complex)
    bare[1:] = cp * a[1:] + cm * a_rev[1:]
    return WaveField(ak=bare, omega_tilde=linear_dispersion(n),
                     eta_used=1.0, t=wave.t)


def wave_series(qs, ps, eta):
    """Renormalized amplitude matrix [samples x N] from trajectory rows.

    qs and ps are [samples x N] position / momentum snapshots.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    n = qs.shape[1]
    root = np.sqrt(n)
    wt = eta * linear_dispersion(n)
    qk = root * np.fft.ifft(qs, axis=1)
    pk = root * np.fft.ifft(ps, axis=1)
    ak = np.zeros_like(qk)
    ak[:, 1:] = (pk[:, 1:] - 1j * wt[1:] * qk[:, 1:]) / np.sqrt(2.0 * wt[1:])
    return ak


def _welch_nperseg(nsamples, segments):
    nperseg = (2 * nsamples) // (segments + 1)
    nperseg -= nperseg % 2  # even length keeps the shifted grid uniform
    if nperseg < 8:
        raise ValueError("series too short for %d Welch segments" % segments)
    return nperseg


def spatiotemporal_spectrum(ak_series, sample_dt, window="hann", segments=8,
                            k_list=None, omega_tilde_max=None):
    """Welch power density of each mode column over angular frequency.

    The series is conjugated first, so a mode rotating as exp(-i wt t) shows
    its ridge at +wt on the returned one-sided grid (0, pi/sample_dt]. With
    density scaling, sum(power * domega) / (2 pi) recovers the mean square
    amplitude of the column. If omega_tilde_max is given, the sampling rate
    must resolve it with margin: pi / sample_dt > 1.5 * omega_tilde_max.
    """
    if window not in _WINDOWS:
        raise ValueError("window must be one of %s" % sorted(_WINDOWS))
    if omega_tilde_max is not None and np.pi / sample_dt <= 1.5 * omega_tilde_max:
        raise ValueError("sample_dt too coarse: Nyquist %.3f <= 1.5 * %.3f"
                         % (np.pi / sample_dt, omega_tilde_max))
    n = ak_series.shape[1]
    if k_list is None:
        k_list = np.arange(1, n)
    k_list = np.asarray(k_list, dtype=int)
    nper = _welch_nperseg(ak_series.shape[0], segments)
    freqs, pxx = scipy.signal.welch(
        np.conj(ak_series[:, k_list]), fs=1.0 / sample_dt,
        window=_WINDOWS[window], nperseg=nper, noverlap=nper // 2,
        detrend=False, return_onesided=False, scaling="density", axis=0)
    omega = 2.0 * np.pi * np.fft.fftshift(freqs)
    pxx = np.fft.fftshift(pxx, axes=0)
    pos = omega > 0.0
    # fold the single -Nyquist row onto +Nyquist so the grid covers (0, pi/dt]
    omega_out = np.concatenate([omega[pos], [-omega[0]]])
    power = np.concatenate([pxx[pos], pxx[:1]], axis=0).T
    return SpectralDensity(k_list=k_list, omega=omega_out, power=power,
                           sample_dt=float(sample_dt), window=window,
                           segments=int(segments))


def mode_spectrum(series, sample_dt, nperseg, window="hann"):
    """Welch density of one complex mode series on the full shifted grid.

    Unlike spatiotemporal_spectrum this keeps both frequency signs and lets
    the caller pick the segment length directly, trading variance for the
    resolution needed to resolve a narrow line. Same conjugation convention:
    a mode rotating as exp(-i wt t) peaks at +wt. Returns (omega, power),
    ascending, with sum(power) * domega / (2 pi) equal to the mean square
    of the series up to windowing bias.
    """
    if window not in _WINDOWS:
        raise ValueError("window must be one of %s" % sorted(_WINDOWS))
    series = np.asarray(series)
    if series.ndim != 1:
        raise ValueError("series must be a single mode history")
    if nperseg > series.size:
        raise ValueError("nperseg exceeds the series length")
    freqs, pxx = scipy.signal.welch(
        np.conj(series), fs=1.0 / sample_dt, window=_WINDOWS[window],
        nperseg=int(nperseg), noverlap=int(nperseg) // 2, detrend=False,
        return_onesided=False, scaling="density")
    omega = 2.0 * np.pi * np.fft.fftshift(freqs)
    return omega, np.fft.fftshift(pxx)


def _band_centroid(omega, power, center, band):
    lo, hi = band[0] * center, band[1] * center
    sel = (omega >= lo) & (omega <= hi)
    if not np.any(sel):
        raise ValueError("empty frequency band [%g, %g]" % (lo, hi))
    weight = np.sum(power[sel])
    if weight <= 0.0:
        raise ValueError("no spectral mass in band [%g, %g]" % (lo, hi))
    return np.sum(omega[sel] * power[sel]) / weight


def measure_eta(density, omega_k, band=(0.25, 2.5)):
    """Per-mode dispersion scale factors from ridge centroids.

    omega_k holds the bare frequencies: either one entry per row of
    density.power, or a full dispersion array indexed by the mode numbers in
    density.k_list. For each mode the peak bin gives a first frequency
    estimate; the centroid of the band [band_0, band_1] * estimate refines
    it, and the band is re-centered once on that centroid. eta_k is
    centroid / omega_k and eta_bar is the plain mean of the eta_k.
    """
    omega_k = np.asarray(omega_k, dtype=float)
    if omega_k.shape == (len(density.k_list),):
        bare = omega_k
    elif omega_k.ndim == 1 and len(omega_k) > int(np.max(density.k_list)):
        bare = omega_k[density.k_list]
    else:
        raise ValueError("omega_k must align with k_list or cover its modes")
    eta_k = np.empty(len(density.k_list))
    for i in range(len(density.k_list)):
        row = density.power[i]
        est = density.omega[np.argmax(row)]
        cen = _band_centroid(density.omega, row, est, band)
        cen = _band_centroid(density.omega, row, cen, band)
        eta_k[i] = cen / bare[i]
    return eta_k, float(np.mean(eta_k))


def measure_eta_fixed_point(qs, ps, sample_dt, window="hann", segments=8,
                            k_list=None, iterations=3):
    """Measure eta with no thermodynamic input.

    Starts from eta = 1, builds the wave series, measures the mean ridge
    position, and repeats with the updated factor. The ridge location is set
    by the dynamics, so the loop settles in two or three passes.
    """
    eta = 1.0
    history = []
    for _ in range(iterations):
        ak = wave_series(qs, ps, eta)
        dens = spatiotemporal_spectrum(ak, sample_dt, window=window,
                                       segments=segments, k_list=k_list)
        _, eta = measure_eta(dens, linear_dispersion(qs.shape[1]))
        history.append(eta)
    return eta, history


def _jackknife(block_means):
    """Standard error of the grand mean from per-block means [B x ...]."""
    b = block_means.shape[0]
    tot = np.sum(block_means, axis=0)
    loo = (tot - block_means) / (b - 1)
    center = np.mean(loo, axis=0)
    dev = loo - center
    var = (b - 1) / b * np.sum(np.abs(dev) ** 2, axis=0)
    return np.sqrt(var)


def mode_statistics(qs, ps, eta, blocks=16):
    """Equilibrium one- and two-mode moments along the k <-> N-k pairing."""
    nsamp, n = qs.shape
    if nsamp < 2 * blocks:
        raise ValueError("need at least two samples per jackknife block")
    root = np.sqrt(n)
    qk = root * np.fft.ifft(qs, axis=1)
    pk = root * np.fft.ifft(ps, axis=1)
    wt = eta * linear_dispersion(n)
    ak = np.zeros_like(qk)
    ak[:, 1:] = (pk[:, 1:] - 1j * wt[1:] * qk[:, 1:]) / np.sqrt(2.0 * wt[1:])

    def paired(mat):
        return np.roll(mat[:, ::-1], 1, axis=1)  # column k -> column N-k

    prods = {
        "n_k": (np.abs(ak) ** 2).astype(complex),
        "aa": ak * paired(ak),
        "pp": pk * paired(pk),
        "qq": qk * paired(qk),
        "pq": pk * paired(qk),
    }
    edges = np.linspace(0, nsamp, blocks + 1, dtype=int)
    out = {}
    for name, series in prods.items():
        bm = np.stack([series[lo:hi, 1:].mean(axis=0)
                       for lo, hi in zip(edges[:-1], edges[1:])])
        out[name] = series[:, 1:].mean(axis=0)
        out[name + "_se"] = _jackknife(bm)
    return ModeStatistics(
        k=np.arange(1, n),
        n_k=out["n_k"].real, n_k_se=out["n_k_se"],
        aa=out["aa"], aa_se=out["aa_se"],
        pp=out["pp"].real, pp_se=out["pp_se"],
        qq=out["qq"].real, qq_se=out["qq_se"],
        pq=out["pq"], pq_se=out["pq_se"],
        eta_used=float(eta), samples=nsamp, blocks=blocks)


def autocorrelation(series, max_lag):
    """Biased-normalized autocorrelation C[tau] = mean_s x_{s+tau} conj(x_s).

    series is 1-d or [samples x columns]; lags 0..max_lag are returned along
    the first axis. The 1/T normalization keeps the implied spectrum
    non-negative. Requires max_lag < samples/2 so the tail is supported.
    """
    x = np.asarray(series)
    one_d = x.ndim == 1
    if one_d:
        x = x[:, None]
    nsamp = x.shape[0]
    if not 0 <= max_lag < nsamp / 2:
        raise ValueError("max_lag must satisfy 0 <= max_lag < samples/2")
    nfft = scipy.fft.next_fast_len(2 * nsamp)
    f = np.fft.fft(x, n=nfft, axis=0)
    corr = np.fft.ifft(f * np.conj(f), axis=0)[:max_lag + 1] / nsamp
    if np.isrealobj(series):
        corr = corr.real
    return corr[:, 0] if one_d else corr


def spectrum_from_correlation(corr, sample_dt):
    """Spectrum of a correlation sequence known for lags 0..M-1.

    The sequence is extended to negative lags by conjugate symmetry
    C(-t) = conj(C(t)) and transformed with the e^{+i omega t} convention:
    S(omega) = dt * sum_t C(t) e^{+i omega t}. Returns (omega, S) with omega
    ascending over one full period and S real up to round-off.
    """
    corr = np.asarray(corr, dtype=complex)
    m = corr.shape[0]
    full = np.concatenate([np.conj(corr[:0:-1]), corr])
    length = full.shape[0]
    coef = np.fft.ifft(full) * length
    idx = np.arange(length)
    spec = sample_dt * coef * np.exp(-2j * np.pi * idx * (m - 1) / length)
    omega = 2.0 * np.pi * np.fft.fftfreq(length, d=sample_dt)
    order = np.argsort(omega)
    return omega[order], spec[order].real
