"""Tests for breather filtering, interval tracking, and the zig-zag run.

Filter checks use bin-aligned synthetic tones so the brick-wall split is
exact; tracking checks use hand-built intensity matrices where every track,
lifetime, and span is known by construction.
"""

import numpy as np
import pytest

from fpulab.breathers import (
    FilteredField,
    default_omega_cut,
    detect_breathers,
    frequency_filter,
    pi_mode_experiment,
)
from fpulab.chain import ModelParams, pi_mode_energy
from fpulab.thermo import thermo_solution


class TestFrequencyFilter:
    def two_tone(self, nt=1024, dt=0.25):
        # bin-aligned tones: slow at bin 20, fast at bin 200
        t = np.arange(nt) * dt
        dom = 2.0 * np.pi / (nt * dt)
        w_lo, w_hi = 20 * dom, 200 * dom
        rows = np.vstack([
            np.cos(w_lo * t) + 0.5 * np.cos(w_hi * t),
            2.0 * np.sin(w_lo * t) - np.sin(w_hi * t),
        ])
        return t, rows, w_lo, w_hi

    def test_brick_wall_separates_tones(self):
        t, rows, w_lo, w_hi = self.two_tone()
        cut = 0.5 * (w_lo + w_hi)
        out = frequency_filter(rows, cut, 0.25)
        want = np.vstack([0.5 * np.cos(w_hi * t), -np.sin(w_hi * t)])
        assert np.allclose(out.values, want, atol=1e-12)
        assert out.omega_cut == cut
        assert out.sample_dt == 0.25

    def test_linearity(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(4, 256))
        y = rng.normal(size=(4, 256))
        cut, dt = 1.0, 0.5
        lhs = frequency_filter(2.0 * x - 3.0 * y, cut, dt).values
        rhs = (2.0 * frequency_filter(x, cut, dt).values
               - 3.0 * frequency_filter(y, cut, dt).values)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(3, 200))
        once = frequency_filter(x, 0.8, 0.3).values
        twice = frequency_filter(once, 0.8, 0.3).values
        assert np.allclose(once, twice, atol=1e-12)

    def test_constant_row_removed(self):
        x = np.full((2, 128), 7.5)
        out = frequency_filter(x, 1.0, 0.1)
        assert np.allclose(out.values, 0.0, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="site x time"):
            frequency_filter(np.zeros(16), 1.0, 0.1)
        with pytest.raises(ValueError, match="omega_cut"):
            frequency_filter(np.zeros((2, 16)), 0.0, 0.1)
        with pytest.raises(ValueError, match="omega_cut"):
            frequency_filter(np.zeros((2, 16)), 40.0, 0.1)  # beyond Nyquist

    def test_cut_scales_with_eta(self):
        assert default_omega_cut(1.0) == pytest.approx(2.2)
        assert default_omega_cut(1.3) == pytest.approx(2.86)


def blob_matrix(nt=40, n=32, sites=(10, 11, 12), frames=range(5, 30),
                value=50.0):
    out = np.ones((nt, n))
    for it in frames:
        for s in sites:
            out[it, s % n] = value
    return out


class TestDetectBreathers:
    def test_single_stationary_blob(self):
        mat = blob_matrix()
        tracks = detect_breathers(mat, frame_dt=0.5)
        assert len(tracks) == 1
        tr = tracks[0]
        assert len(tr.frames) == 25
        assert tr.lifetime == pytest.approx(24 * 0.5)
        assert tr.mean_span == pytest.approx(3.0)
        t0, iv, peak = tr.frames[0]
        assert t0 == pytest.approx(5 * 0.5)
        assert iv == (10, 3)
        assert peak == 50.0

    def test_drifting_blob_stays_linked(self):
        nt, n = 30, 32
        mat = np.ones((nt, n))
        for it in range(nt):
            for d in range(3):
                mat[it, (6 + it + d) % n] = 40.0
        tracks = detect_breathers(mat, frame_dt=1.0)
        assert len(tracks) == 1
        starts = [f[1][0] for f in tracks[0].frames]
        assert starts == [(6 + it) % n for it in range(nt)]

    def test_wraparound_interval(self):
        mat = blob_matrix(sites=(31, 0, 1))
        tracks = detect_breathers(mat, frame_dt=1.0)
        assert len(tracks) == 1
        assert tracks[0].frames[0][1] == (31, 3)

    def test_wide_excursions_ignored(self):
        mat = blob_matrix(sites=tuple(range(8)))  # wider than max_span
        assert detect_breathers(mat, frame_dt=1.0) == []

    def test_system_wide_frame_ignored(self):
        mat = np.ones((10, 16))
        mat[4] = 100.0
        assert detect_breathers(mat, frame_dt=1.0) == []

    def test_two_blobs_two_tracks(self):
        mat = blob_matrix(sites=(3, 4))
        for it in range(5, 30):
            mat[it, 20] = 60.0
        tracks = detect_breathers(mat, frame_dt=1.0)
        assert len(tracks) == 2
        spans = sorted(tr.mean_span for tr in tracks)
        assert spans == [1.0, 2.0]

    def test_gap_splits_track(self):
        mat = blob_matrix(frames=list(range(5, 15)) + list(range(16, 30)))
        tracks = detect_breathers(mat, frame_dt=1.0)
        assert len(tracks) == 2
        assert sorted(len(tr.frames) for tr in tracks) == [10, 14]

    def test_min_lifetime_filter(self):
        mat = blob_matrix(frames=range(5, 8))
        assert len(detect_breathers(mat, frame_dt=1.0)) == 1
        assert detect_breathers(mat, frame_dt=1.0, min_lifetime=5.0) == []

    def test_filtered_field_source_squares_values(self):
        n, nt = 32, 80
        values = np.full((n, nt), 1e-3)
        values[7] = 10.0
        field = FilteredField(values=values, omega_cut=1.0, sample_dt=1.0)
        tracks = detect_breathers(field)
        assert len(tracks) == 1
        assert tracks[0].frames[0][2] == pytest.approx(100.0)
        assert tracks[0].frames[1][0] == pytest.approx(1.0)

    def test_filtered_field_default_lifetime_cut(self):
        # default minimum lifetime is ten filter periods = 62.8 time units
        n = 32
        values = np.full((n, 40), 1e-3)
        values[7] = 10.0
        field = FilteredField(values=values, omega_cut=1.0, sample_dt=1.0)
        assert detect_breathers(field) == []

    def test_validation(self):
        with pytest.raises(ValueError, match="frame_dt"):
            detect_breathers(np.ones((4, 8)))
        with pytest.raises(ValueError, match="time x site"):
            detect_breathers(np.ones(8), frame_dt=1.0)
        with pytest.raises(ValueError, match="baseline"):
            detect_breathers(np.zeros((4, 8)), frame_dt=1.0)


@pytest.fixture(scope="module")
def result():
    params = ModelParams(n=32, beta=1.0, energy=pi_mode_energy(32, 1.0, 0.4))
    return pi_mode_experiment(params, 0.4, horizon=200.0, dt=0.02,
                              frame_dt=0.5)


class TestPiModeExperiment:
    def test_initial_pattern_is_uniform(self, result):
        # the unstable zig-zag distributes energy evenly: L(0) = 1 and every
        # site carries the closed-form density 2 a^2 + 4 beta a^4
        assert result.localization[0] == pytest.approx(1.0, abs=1e-9)
        want = 2.0 * 0.4 ** 2 + 4.0 * 1.0 * 0.4 ** 4
        assert result.ebar == pytest.approx(want, rel=1e-12)
        assert np.allclose(result.energies[0], want, rtol=1e-9)

    def test_frames_and_times(self, result):
        assert result.times.size == 401
        assert result.times[0] == 0.0
        assert result.times[-1] == pytest.approx(200.0)
        assert result.energies.shape == (401, 32)
        assert result.localization.shape == (401,)

    def test_energy_conserved_across_frames(self, result):
        totals = result.energies.sum(axis=1)
        assert np.ptp(totals) / totals[0] < 1e-8

    def test_window_falls_back_to_full_run(self, result):
        # this short mild run never reaches L = 5, so the spectral window
        # must cover everything
        assert result.localization.max() < 5.0
        assert result.db_window == (0.0, pytest.approx(200.0))

    def test_eta_comes_from_gibbs_solution(self, result):
        want = thermo_solution(1.0, result.ebar).eta
        assert result.eta_used == pytest.approx(want, rel=1e-12)

    def test_spectrum_block(self, result):
        assert result.spectrum.omega.ndim == 1
        assert result.spectrum.power.shape == (result.spectrum.k_list.size,
                                               result.spectrum.omega.size)
        assert np.all(result.spectrum.power >= 0.0)
