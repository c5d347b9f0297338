"""Tests for the collision-integral linewidth closure.

The central oracle is a literal triple-loop transcription of the closure sum
(offsets, self-term and exact-quartet exclusions, W -> 0 limit) evaluated at
a handful of times on a small lattice; the module must reproduce it to
roundoff. Width extraction is cross-checked between the banded fast route
and a dense grid transform, and against a synthetic exponential whose
Lorentzian width is known.
"""

import numpy as np
import pytest

from fpulab.linewidth import (
    CorrelationPrediction,
    correlation_time,
    decay_time,
    default_time_grid,
    predict_correlation,
    predict_spectrum,
    predict_width,
    spectral_width,
)
from fpulab.resonance import exact_quartets
from fpulab.thermo import thermo_solution


def brute_ln_ratio(k, n, th, t, umklapp=True, kernel="renormalized",
                   tol=1e-9):
    """Direct evaluation of the closure sum, one scalar time."""
    om = 2.0 * np.sin(np.pi * np.arange(n) / n)
    total = 0.0 + 0.0j
    offsets = (-n, 0, n) if umklapp else (0,)
    for off in offsets:
        for l in range(1, n):
            for m in range(1, n):
                s = k + l - m - off
                if not 1 <= s <= n - 1:
                    continue
                if m == k or s == k:
                    continue
                res = om[k] + om[l] - om[m] - om[s]
                trivial = (m == k and s == l) or (m == l and s == k)
                if not trivial and abs(res) < tol:
                    continue
                w = th.eta * res if kernel == "renormalized" else res
                amp = om[m] + om[s] - om[l]
                if abs(w) < 1e-12:
                    total += amp * (-0.5 * t * t)
                else:
                    total += amp * (np.exp(1j * w * t) - 1.0 - 1j * w * t) / w ** 2
    pref = (9.0 * th.beta ** 2 * th.theta ** 2
            / (8.0 * n ** 2 * th.eta ** 6)) * om[k]
    return pref * total


@pytest.fixture(scope="module")
def th():
    return thermo_solution(0.5, 100.0 / 256.0)


class TestAgainstBruteForce:
    def test_renormalized_kernel(self, th):
        for k in (3, 7):
            ts = np.array([0.0, 0.3, 1.7, 9.4])
            pred = predict_correlation(k, ts, 16, th)
            want = np.exp([brute_ln_ratio(k, 16, th, t) for t in ts])
            assert np.allclose(pred.c_over_c0, want, rtol=0, atol=1e-14)

    def test_bare_kernel_and_no_umklapp(self, th):
        for umk in (True, False):
            pred = predict_correlation(3, np.array([1.7]), 16, th,
                                       umklapp=umk, kernel="bare")
            want = np.exp(brute_ln_ratio(3, 16, th, 1.7, umklapp=umk,
                                         kernel="bare"))
            assert abs(pred.c_over_c0[0] - want) < 1e-14

    def test_uniform_and_scattered_grids_agree(self, th):
        # the compiled uniform-step path and the tiled arbitrary-time path
        # must produce identical values
        tg = np.array([0.0, 0.7, 1.1, 9.4])
        scattered = predict_correlation(90, tg, 256, th)
        for i, tv in enumerate(tg):
            uniform = predict_correlation(90, np.array([tv, tv + 1.0]), 256, th)
            assert abs(scattered.c_over_c0[i] - uniform.c_over_c0[0]) < 1e-12


class TestStructure:
    def test_starts_at_one(self, th):
        pred = predict_correlation(12, np.array([0.0]), 64, th)
        assert pred.c_over_c0[0] == 1.0 + 0.0j

    def test_magnitude_never_exceeds_one(self, th):
        grid = np.linspace(0.0, 200.0, 401)
        for k in (5, 31, 50):
            pred = predict_correlation(k, grid, 64, th)
            assert np.abs(pred.c_over_c0).max() <= 1.0 + 1e-12

    def test_negative_time_is_conjugate(self, th):
        pred_p = predict_correlation(20, np.array([3.7]), 64, th)
        pred_m = predict_correlation(20, np.array([-3.7]), 64, th)
        assert abs(pred_m.c_over_c0[0] - np.conj(pred_p.c_over_c0[0])) < 1e-14

    def test_excluded_counts_match_exact_quartets(self, th):
        counts = {}
        for q in exact_quartets(256):
            counts[q.k] = counts.get(q.k, 0) + 1
        for k in (38, 64, 90, 100):
            pred = predict_correlation(k, np.array([0.0]), 256, th)
            assert pred.excluded == counts[k]

    def test_umklapp_opens_channels(self, th):
        # umklapp terms add decay: at one renormalized period the magnitude
        # with umklapp must lie strictly below the momentum-conserving one
        for k in (30, 90, 128, 200):
            om_k = th.eta * 2.0 * np.sin(np.pi * k / 256)
            tt = np.array([2.0 * np.pi / om_k])
            full = predict_correlation(k, tt, 256, th, umklapp=True)
            bare = predict_correlation(k, tt, 256, th, umklapp=False)
            assert full.terms > bare.terms
            assert abs(full.c_over_c0[0]) < abs(bare.c_over_c0[0])

    def test_parameter_validation(self, th):
        with pytest.raises(ValueError, match="kernel"):
            predict_correlation(3, np.array([0.0]), 16, th, kernel="fast")
        with pytest.raises(ValueError, match="k must"):
            predict_correlation(0, np.array([0.0]), 16, th)
        with pytest.raises(ValueError, match="k must"):
            predict_correlation(16, np.array([0.0]), 16, th)


class TestDecayTimes:
    def test_adaptive_matches_dense_grid(self, th):
        tau, ratio = decay_time(20, 64, th)
        grid = default_time_grid(64, th.eta, periods=256, per_period=64)
        pred = predict_correlation(20, grid, 64, th)
        tau_g, ratio_g = correlation_time(pred)
        assert tau == pytest.approx(tau_g, rel=1e-3)
        assert ratio == pytest.approx(ratio_g, rel=1e-3)

    def test_synthetic_exponential(self, th):
        t = np.linspace(0.0, 400.0, 8001)
        c = np.exp(-0.05 * t)
        syn = CorrelationPrediction(
            k=30, t_grid=t, c_over_c0=c.astype(complex), umklapp=True,
            kernel="renormalized", n=256, beta=0.5, edensity=100 / 256,
            theta=th.theta, eta=th.eta, terms=0, excluded=0)
        tau, ratio = correlation_time(syn)
        assert tau == pytest.approx(20.0, rel=1e-6)
        om_k = th.eta * 2.0 * np.sin(np.pi * 30 / 256)
        assert ratio == pytest.approx(20.0 * om_k / (2.0 * np.pi), rel=1e-6)

    def test_size_doubling_leaves_decay_stable(self, th):
        # fixed k/N: collision time is a spectral-density property, stable
        # against doubling the lattice
        tau_a = decay_time(45, 128, th)[0]
        tau_b = decay_time(90, 256, th)[0]
        assert abs(tau_a - tau_b) / tau_b < 0.15

    def test_no_decay_without_coupling(self):
        th0 = thermo_solution(0.0, 0.5)
        with pytest.raises(ValueError, match="never crossed"):
            decay_time(30, 64, th0)

    def test_grid_route_requires_crossing(self, th):
        pred = predict_correlation(20, np.linspace(0.0, 1.0, 11), 64, th)
        with pytest.raises(ValueError, match="extend the horizon"):
            correlation_time(pred)


class TestSpectralWidth:
    def test_rectangle(self):
        om = np.linspace(-2.0, 2.0, 401)
        power = np.where(np.abs(om) <= 0.5, 3.0, 0.0)
        # discrete rectangle: mass counts 101 bins of height 3
        want = 101 * 0.01
        assert spectral_width(power, om) == pytest.approx(want, rel=1e-12)

    def test_triangle_gives_half_base(self):
        om = np.linspace(-1.0, 1.0, 2001)
        power = np.clip(1.0 - np.abs(om) / 0.4, 0.0, None)
        assert spectral_width(power, om) == pytest.approx(0.4, rel=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError, match="equal-length"):
            spectral_width(np.ones(5), np.ones(6))
        with pytest.raises(ValueError, match="non-positive"):
            spectral_width(np.zeros(5), np.linspace(0, 1, 5))
        with pytest.raises(ValueError, match="uniform"):
            spectral_width(np.ones(5), np.array([0.0, 1.0, 2.0, 4.0, 8.0]))


class TestLineShapes:
    def test_synthetic_lorentzian(self, th):
        gam, delta = 0.05, 0.06
        t = np.linspace(0.0, 400.0, 8001)
        c = np.exp(-(gam + 1j * delta) * t)
        syn = CorrelationPrediction(
            k=30, t_grid=t, c_over_c0=c, umklapp=True, kernel="renormalized",
            n=256, beta=0.5, edensity=100 / 256, theta=th.theta, eta=th.eta,
            terms=0, excluded=0)
        spec = predict_spectrum(syn)
        width = spectral_width(spec.power, spec.omega)
        assert width == pytest.approx(np.pi * gam, rel=0.01)
        om_k = th.eta * 2.0 * np.sin(np.pi * 30 / 256)
        peak = spec.omega[np.argmax(spec.power)]
        dom = spec.omega[1] - spec.omega[0]
        assert abs(peak - (om_k + delta)) < 1.5 * dom
        mass = np.sum(spec.power) * dom / (2.0 * np.pi)
        assert mass == pytest.approx(1.0, rel=0.02)

    def test_spectrum_guards(self, th):
        t = np.linspace(0.0, 10.0, 101)
        slow = CorrelationPrediction(
            k=3, t_grid=t, c_over_c0=np.exp(-0.01 * t).astype(complex),
            umklapp=True, kernel="renormalized", n=64, beta=0.5,
            edensity=0.4, theta=th.theta, eta=th.eta, terms=0, excluded=0)
        with pytest.raises(ValueError, match="horizon"):
            predict_spectrum(slow)
        ragged = CorrelationPrediction(
            k=3, t_grid=np.array([0.0, 1.0, 3.0]),
            c_over_c0=np.array([1.0, 0.0, 0.0], dtype=complex),
            umklapp=True, kernel="renormalized", n=64, beta=0.5,
            edensity=0.4, theta=th.theta, eta=th.eta, terms=0, excluded=0)
        with pytest.raises(ValueError, match="uniform"):
            predict_spectrum(ragged)

    def test_banded_width_matches_dense_transform(self, th):
        # the fast route splits collision terms into in-band and out-of-band
        # parts; the dense route transforms the full correlation on a long
        # uniform grid
        w_fast, spec = predict_width(90, 256, th)
        grid = default_time_grid(256, th.eta, periods=24, per_period=192)
        pred = predict_correlation(90, grid, 256, th)
        assert abs(pred.c_over_c0[-1]) < 1e-3
        dense = predict_spectrum(pred)
        w_dense = spectral_width(dense.power, dense.omega)
        assert abs(w_fast - w_dense) / w_dense < 0.02

    def test_width_times_tau_near_pi(self, th):
        # an exponential decay gives exactly pi; the actual early-time
        # curvature leaves the product within a few percent of it
        w_fast, _ = predict_width(90, 256, th)
        tau, _ = decay_time(90, 256, th)
        assert w_fast * tau == pytest.approx(np.pi, rel=0.10)

    def test_line_sits_near_renormalized_frequency(self, th):
        _, spec = predict_width(90, 256, th)
        om_k = th.eta * 2.0 * np.sin(np.pi * 90 / 256)
        peak = spec.omega[np.argmax(spec.power)]
        # collision shift displaces the line by a fraction of its width
        assert abs(peak - om_k) < 0.5
