"""Tests for resonance manifolds: periodic deltas, branch curves, exact quartets.

Oracles: the wrapped delta functions are checked against direct integer
arithmetic, branch roots are plugged back into the dispersion sum, and the
four-index family {k, n/2-k, n/2+k, n-k} is verified to be exact analytically
(sin a + cos a = cos a + sin a) so the scan output can be compared against a
closed-form enumeration.
"""

import numpy as np
import pytest

from fpulab.resonance import (
    KIND_TRIVIAL,
    KIND_UMKLAPP_MINUS,
    KIND_UMKLAPP_PLUS,
    PeriodicDelta,
    delta22,
    delta31,
    delta40,
    exact_quartets,
    momentum_partner,
    nontrivial_branches,
    quartet_time_average,
    resonance_mask,
    verify_no_3to1,
    verify_no_4to0,
)
from fpulab.spectral import linear_dispersion


def family_tuples(n):
    """All ordered exact quartets (k,l,m,s) predicted by the closed form.

    For even n the pair (k, n/2-k) resonates with (n/2+k, n-k): the frequency
    sum 2 sin(pi k/n) + 2 cos(pi k/n) is shared and momentum differs by +-n.
    """
    out = set()
    if n % 2:
        return out
    for k in range(1, n // 2):
        l = n // 2 - k
        if l < 1:
            continue
        m, s = n // 2 + k, n - k
        for a, b in ((k, l), (l, k)):
            for c, d in ((m, s), (s, m)):
                out.add((a, b, c, d))
                out.add((c, d, a, b))
    return out


class TestPeriodicDelta:
    def test_arity_tables(self):
        assert PeriodicDelta("d22").offsets(10) == (-10, 0, 10)
        assert PeriodicDelta("d31").offsets(10) == (0, 10, 20)
        assert PeriodicDelta("d40").offsets(10) == (10, 20, 30)

    def test_invalid_arity(self):
        with pytest.raises(ValueError):
            PeriodicDelta("d13")

    def test_d22_matches_integer_arithmetic(self):
        n = 12
        k, l, m, s = np.meshgrid(*[np.arange(n)] * 4, indexing="ij")
        got = delta22(k, l, m, s, n)
        want = np.isin(k + l - m - s, (-n, 0, n))
        assert np.array_equal(got, want)

    def test_d31_and_d40_signed_sums(self):
        n = 8
        assert delta31(3, 4, 5, 4, n)          # 3+4+5-4 = 8
        assert delta31(1, 2, 3, 6, n)          # 1+2+3-6 = 0
        assert not delta31(1, 2, 3, 5, n)
        assert delta40(2, 3, 4, 7, n)          # sums to 16
        assert not delta40(1, 1, 1, 2, n)      # 5 not a multiple offset

    def test_scalar_and_array_inputs_agree(self):
        n = 16
        ks = np.array([1, 2, 3])
        vec = delta22(ks, 5, 6, ks, n)
        scal = [delta22(int(k), 5, 6, int(k), n) for k in ks]
        assert list(vec) == scal


class TestNontrivialBranches:
    def test_roots_satisfy_dispersion_sum(self):
        # every returned z, with its momentum partner, must close the
        # frequency balance sin x + sin y = sin z + sin v to roundoff
        for x in np.linspace(0.05, 0.95, 13):
            for y in np.linspace(0.05, 0.95, 13):
                for z in nontrivial_branches(x, y):
                    assert 0.0 < z < 1.0
                    v = momentum_partner(x, y, z)
                    assert 0.0 < v < 1.0
                    r = abs(
                        np.sin(np.pi * x) + np.sin(np.pi * y)
                        - np.sin(np.pi * z) - np.sin(np.pi * v)
                    )
                    assert r < 1e-12

    def test_family_line_recovered(self):
        # on x + y = 1/2 the exact quartet continuum passes through
        # z = x + 1/2, v = 1 - x
        for x in (0.1, 0.18, 0.33, 0.4):
            br = nontrivial_branches(x, 0.5 - x)
            assert any(abs(z - (x + 0.5)) < 1e-6 for z in br)
            assert any(abs(z - (1.0 - x)) < 1e-6 for z in br)

    def test_empty_when_no_real_root(self):
        assert nontrivial_branches(0.5, 0.5) == ()

    def test_tangency_double_root_kept(self):
        # at x = y = 3/4 the branch coefficient equals -1 exactly and the
        # two roots merge at z = 1/4; float noise in tan*cos must not drop it
        br = nontrivial_branches(0.75, 0.75)
        assert any(abs(z - 0.25) < 1e-6 for z in br)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            nontrivial_branches(0.0, 0.5)
        with pytest.raises(ValueError):
            nontrivial_branches(0.3, 1.0)

    def test_momentum_partner_validation(self):
        # both umklapp offsets give a partner outside (0,1)
        with pytest.raises(ValueError):
            momentum_partner(0.5, 0.5, 0.5)


class TestExactQuartets:
    def test_n256_matches_closed_form_enumeration(self):
        qs = exact_quartets(256)
        got = {(q.k, q.l, q.m, q.s) for q in qs}
        assert len(qs) == len(got) == 506
        assert got == family_tuples(256)

    def test_kinds_and_residuals(self):
        for q in exact_quartets(256):
            off = q.k + q.l - q.m - q.s
            assert off in (-256, 256)
            want = KIND_UMKLAPP_PLUS if off == 256 else KIND_UMKLAPP_MINUS
            assert q.kind == want
            assert q.residual < 1e-12

    def test_no_trivial_pairings_reported(self):
        for q in exact_quartets(256):
            assert {q.m, q.s} != {q.k, q.l}
            assert q.kind != KIND_TRIVIAL

    def test_degenerate_self_paired_member(self):
        got = {(q.k, q.l, q.m, q.s) for q in exact_quartets(256)}
        assert (64, 64, 192, 192) in got
        assert (192, 192, 64, 64) in got

    def test_small_even_sizes(self):
        for n in (6, 8, 12):
            got = {(q.k, q.l, q.m, q.s) for q in exact_quartets(n)}
            assert got == family_tuples(n)

    def test_odd_size_has_no_solutions(self):
        assert exact_quartets(7) == []
        assert exact_quartets(15) == []


class TestScanReports:
    def test_no_three_to_one(self):
        rep = verify_no_3to1(256)
        assert rep.n == 256
        assert rep.arity == "d31"
        assert rep.offsets == (0, 256, 512)
        assert rep.candidates == 0
        assert rep.exact_count == 0
        # closest miss over the full integer grid, frozen from the scan
        assert rep.min_residual == pytest.approx(1.478e-5, rel=1e-2)
        assert rep.argmin[:4] == (1, 1, 1, 3)
        assert rep.continuum_min_gap > 0.0

    def test_no_four_to_zero(self):
        rep = verify_no_4to0(256)
        assert rep.candidates == 0
        assert rep.exact_count == 0
        # smallest possible frequency sum is 4 modes at the band bottom
        assert rep.min_residual == pytest.approx(8 * np.sin(np.pi / 256), rel=1e-12)
        assert rep.min_residual > 0.09


class TestQuartetTimeAverage:
    def setup_method(self):
        self.n, self.k = 16, 2
        om = linear_dispersion(self.n)
        rng = np.random.default_rng(5)
        self.amps = rng.uniform(0.5, 1.5, self.n)
        self.amps[0] = 0.0
        t = np.arange(4096) * 1.0
        phases = rng.uniform(0, 2 * np.pi, self.n)
        self.ak = self.amps[None, :] * np.exp(
            -1j * (om[None, :] * t[:, None] + phases[None, :])
        )
        self.om = om

    def expected_grid(self):
        # cells whose four-phase sum vanishes keep the amplitude product,
        # everything else dephases
        n, k, om, amps = self.n, self.k, self.om, self.amps
        want = np.zeros((n, n))
        for l in range(1, n):
            for m in range(1, n):
                s = (k + l - m) % n
                if s == 0:
                    continue
                if abs(om[k] + om[l] - om[m] - om[s]) < 1e-12:
                    want[l, m] = amps[k] * amps[l] * amps[m] * amps[s]
        return want

    def test_persistent_cells_equal_amplitude_product(self):
        g = quartet_time_average(self.ak, self.k, sample_dt=1.0)
        want = self.expected_grid()
        pers = want > 0
        assert np.allclose(g[pers], want[pers], rtol=1e-10)

    def test_off_resonant_cells_dephase(self):
        g = quartet_time_average(self.ak, self.k, sample_dt=1.0)
        want = self.expected_grid()
        idx = np.arange(self.n)
        off = (want == 0) & (idx[:, None] >= 1) & (idx[None, :] >= 1)
        off &= ((self.k + idx[:, None] - idx[None, :]) % self.n) != 0
        assert g[off].max() < 0.15 * want[want > 0].min()

    def test_chunking_invariant(self):
        g1 = quartet_time_average(self.ak, self.k, sample_dt=1.0, chunk=64)
        g2 = quartet_time_average(self.ak, self.k, sample_dt=1.0, chunk=4096)
        assert np.allclose(g1, g2, atol=1e-12)

    def test_min_span_guard(self):
        with pytest.raises(ValueError, match="sample_dt"):
            quartet_time_average(self.ak, self.k, min_span=10.0)
        with pytest.raises(ValueError, match="span"):
            quartet_time_average(self.ak, self.k, sample_dt=1.0, min_span=1e6)


class TestResonanceMask:
    def test_trivial_lines_marked(self):
        n, k = 64, 9
        mask = resonance_mask(n, k)
        assert mask[1:, k].all()
        assert all(mask[l, l] for l in range(1, n))

    def test_zero_slots_excluded(self):
        mask = resonance_mask(64, 9)
        assert not mask[0, :].any()
        assert not mask[:, 0].any()

    def test_covers_exact_quartet_cells(self):
        n = 256
        mask = {}
        for q in exact_quartets(n):
            if q.k not in mask:
                mask[q.k] = resonance_mask(n, q.k)
            assert mask[q.k][q.l, q.m]

    def test_covers_all_near_resonant_cells(self):
        # every integer cell within 1e-3 of the continuum manifold must be
        # inside the default-width mask
        n, k = 256, 90
        om = linear_dispersion(n)
        l, m = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        s = (k + l - m) % n
        res = np.abs(om[k] + om[l] - om[m] - om[s])
        ok = (l >= 1) & (m >= 1) & (s >= 1)
        near = ok & (res < 1e-3)
        assert near.sum() > 400
        assert not (near & ~resonance_mask(n, k)).any()

    def test_mask_is_sparse(self):
        mask = resonance_mask(256, 90)
        assert mask.sum() < 0.15 * 256 * 256
