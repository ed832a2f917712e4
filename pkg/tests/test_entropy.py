"""Entropy layer: worked numbers, spectral identities, and property tests.

np.fft appears only as the full-DFT oracle for Parseval; the package side of
that identity is the algebraic N sum p^2 form.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epmodes.circstats import (
    WeightedPhaseSet, AlignedAngles, DegenerateAlignment,
    extract_phases, doubled_align, resultant,
)
from epmodes.models import Mode, TwoLevelParams, two_level_modes
from epmodes.entropy import (
    HistogramPMF,
    LN_PI_E,
    histogram,
    shannon,
    unfolded_entropy,
    fourier_coeffs,
    value_space_entropy,
    uncertainty_sum,
    renyi,
    chi_squared,
    near_uniform_expansion,
    entropy_report,
)

TWO_PI = 2.0 * np.pi
N = 720


def pmf(p):
    p = np.asarray(p, dtype=float)
    return HistogramPMF(p.size, p)


def random_pmf(rng, n=N):
    x = rng.random(n) + 1e-9
    return pmf(x / x.sum())


def delta_pmf(n=N, at=0):
    p = np.zeros(n)
    p[at] = 1.0
    return pmf(p)


def uniform_pmf(n=N):
    return pmf(np.full(n, 1.0 / n))


def angles(theta, n_bins=N):
    return AlignedAngles(np.asarray(theta, dtype=float), n_bins, 0.0)


class TestHistogram:
    def test_single_atom(self):
        delta = TWO_PI / N
        p = histogram(angles([delta / 2.0]), np.array([3.0]))
        assert p.p[0] == 1.0 and p.p[1:].sum() == 0.0

    def test_two_atoms_opposite(self):
        delta = TWO_PI / N
        p = histogram(angles([delta / 2.0, np.pi + delta / 2.0]),
                      np.array([1.0, 1.0]))
        assert p.p[0] == 0.5 and p.p[N // 2] == 0.5

    def test_uniform_fill(self):
        centers = (np.arange(N) + 0.5) * TWO_PI / N
        p = histogram(angles(centers), np.ones(N))
        assert np.allclose(p.p, 1.0 / N, atol=1e-15)

    def test_pmf_validation(self):
        with pytest.raises(ValueError):
            HistogramPMF(4, np.array([0.5, 0.5, 0.5, -0.5]))
        with pytest.raises(ValueError):
            HistogramPMF(4, np.array([0.3, 0.3, 0.3, 0.3]))

    def test_pushforward_identity(self):
        # doubled mass in theta-bin b equals the phi-bin masses b and b+N
        # on a 2N-bin phi histogram; exact identity, roundoff-level compare
        rng = np.random.default_rng(41)
        phi = rng.random(500) * TWO_PI
        w = rng.random(500) + 0.01
        theta = np.mod(2.0 * phi, TWO_PI)
        p_theta = histogram(angles(theta, N), w)
        p_phi = histogram(angles(phi, 2 * N), w)
        combined = p_phi.p[:N] + p_phi.p[N:]
        assert np.allclose(p_theta.p, combined, atol=1e-12)

    def test_pushforward_bin_mapping(self):
        rng = np.random.default_rng(43)
        phi = rng.random(300) * TWO_PI
        tbin = np.floor(np.mod(2.0 * phi, TWO_PI) * N / TWO_PI).astype(int)
        pbin = np.floor(phi * (2 * N) / TWO_PI).astype(int)
        assert np.array_equal(tbin, pbin % N)


class TestShannon:
    def test_delta(self):
        assert shannon(delta_pmf()) == 0.0

    def test_uniform_720(self):
        s = shannon(uniform_pmf())
        assert abs(s - np.log(720.0)) < 1e-12
        assert abs(s - 6.579) < 1e-3

    def test_two_bins(self):
        p = np.zeros(N)
        p[0] = p[N // 2] = 0.5
        assert abs(shannon(pmf(p)) - np.log(2.0)) < 1e-12

    def test_bounds_random(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            s = shannon(random_pmf(rng))
            assert 0.0 <= s <= np.log(N) + 1e-12


class TestUnfolded:
    def test_balanced_real_mode(self):
        s = WeightedPhaseSet(np.array([0.0, np.pi]), np.array([0.5, 0.5]))
        assert abs(unfolded_entropy(s, N) - np.log(2.0)) < 1e-9

    def test_folded_same_input_is_zero(self):
        s = WeightedPhaseSet(np.array([0.0, np.pi]), np.array([0.5, 0.5]))
        a = doubled_align(s, N)
        assert shannon(histogram(a, s.weights)) == 0.0

    def test_rotation_invariance(self):
        rng = np.random.default_rng(53)
        phi = rng.random(60) * TWO_PI
        w = rng.random(60) + 0.01
        s0 = WeightedPhaseSet(phi, w)
        s1 = WeightedPhaseSet(np.mod(phi + 0.9, TWO_PI), w)
        assert abs(unfolded_entropy(s0, N) - unfolded_entropy(s1, N)) < 1e-12

    def test_degenerate_raises(self):
        s = WeightedPhaseSet(np.array([0.0, np.pi / 2.0]),
                             np.array([0.5, 0.5]))
        with pytest.raises(DegenerateAlignment):
            unfolded_entropy(s, N)


class TestFourier:
    def test_uniform_binned_vanishes(self):
        f = fourier_coeffs(uniform_pmf(), 50)
        assert np.abs(f.F[1:]).max() < 1e-12
        assert f.F[0] == 1.0 and f.source == "binned"

    def test_two_atom_parity_pattern(self):
        a = angles([0.0, np.pi])
        f = fourier_coeffs(a, 50, weights=np.array([0.5, 0.5]))
        k = np.arange(51)
        want = (1.0 + (-1.0) ** k) / 2.0
        assert np.allclose(np.abs(f.F), want, atol=1e-12)
        assert f.source == "sample"

    def test_sample_f1_matches_resultant(self):
        rng = np.random.default_rng(59)
        phi = rng.random(80) * TWO_PI
        w = rng.random(80) + 0.01
        s = WeightedPhaseSet(phi, w)
        a = doubled_align(s, N)
        f = fourier_coeffs(a, 10, weights=w)
        doubled = WeightedPhaseSet(a.theta_shift, w)
        for k in range(1, 11):
            assert abs(abs(f.F[k]) - resultant(doubled, k).R_k) < 1e-12

    def test_magnitude_bound(self):
        rng = np.random.default_rng(61)
        f = fourier_coeffs(random_pmf(rng), 50)
        assert np.all(np.abs(f.F) <= 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            fourier_coeffs(uniform_pmf(), 0)
        with pytest.raises(ValueError):
            fourier_coeffs(angles([0.1]), 5)  # sample form needs weights
        with pytest.raises(TypeError):
            fourier_coeffs(np.zeros(3), 5)


class TestValueSpace:
    def test_delta_gives_log_kmax_plus_one(self):
        f = fourier_coeffs(delta_pmf(), 50)
        assert abs(value_space_entropy(f) - np.log(51.0)) < 1e-12

    def test_uniform_gives_zero(self):
        f = fourier_coeffs(uniform_pmf(), 50)
        assert value_space_entropy(f) < 1e-10

    def test_two_atom_gives_log_26(self):
        a = angles([0.0, np.pi])
        f = fourier_coeffs(a, 50, weights=np.array([0.5, 0.5]))
        assert abs(value_space_entropy(f) - np.log(26.0)) < 1e-12


class TestUncertaintySum:
    def test_two_point_case(self):
        u = uncertainty_sum(0.693, 0.0)
        assert u["sum"] == 0.693 and u["bound_gap"] < 0.0

    def test_uniform_case(self):
        u = uncertainty_sum(6.579, 0.0)
        assert abs(u["bound_gap"] - 4.434) < 1e-3

    def test_symmetry(self):
        assert uncertainty_sum(1.3, 0.4) == uncertainty_sum(0.4, 1.3)

    def test_bound_constant(self):
        assert abs(LN_PI_E - 2.1447) < 1e-4


class TestRenyi:
    def test_uniform_any_alpha(self):
        for a in (0.5, 1.0, 1.5, 2.0, 3.0):
            assert abs(renyi(uniform_pmf(), a) - np.log(720.0)) < 1e-12

    def test_delta_any_alpha(self):
        for a in (0.5, 1.0, 2.0):
            assert abs(renyi(delta_pmf(), a)) < 1e-15

    def test_three_quarters_example(self):
        p = pmf([0.75, 0.25])
        assert abs(renyi(p, 2.0) - np.log(8.0 / 5.0)) < 1e-12

    def test_alpha_one_takes_shannon_branch(self):
        rng = np.random.default_rng(67)
        p = random_pmf(rng)
        assert renyi(p, 1.0) == shannon(p)
        assert renyi(p, 1.0 + 5e-10) == shannon(p)

    def test_continuity_at_one(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            p = random_pmf(rng)
            h1 = renyi(p, 1.0)
            assert abs(renyi(p, 1.0 + 1e-4) - h1) <= 1e-3
            assert abs(renyi(p, 1.0 - 1e-4) - h1) <= 1e-3

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(73)
        grid = (0.5, 1.0, 1.5, 2.0, 3.0)
        for _ in range(100):
            p = random_pmf(rng)
            vals = [renyi(p, a) for a in grid]
            assert all(vals[i] >= vals[i + 1] - 1e-12
                       for i in range(len(vals) - 1))

    def test_divergence_form(self):
        # H_alpha = ln N - D_alpha(p || uniform), D per its own definition
        rng = np.random.default_rng(79)
        for a in (0.5, 1.5, 2.0, 3.0):
            p = random_pmf(rng)
            u = 1.0 / p.N_bins
            d = np.log(np.sum(p.p**a * u ** (1.0 - a))) / (a - 1.0)
            assert abs(renyi(p, a) - (np.log(p.N_bins) - d)) < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            renyi(uniform_pmf(), 0.0)


class TestChiSquared:
    def test_uniform(self):
        # clamped at zero from below; above, fold roundoff leaves ~1e-15
        assert 0.0 <= chi_squared(uniform_pmf()) < 1e-12

    def test_delta(self):
        assert abs(chi_squared(delta_pmf()) - 719.0) < 1e-9

    def test_h2_identity_seeded(self):
        rng = np.random.default_rng(83)
        for _ in range(1000):
            p = random_pmf(rng)
            lhs = renyi(p, 2.0)
            rhs = np.log(p.N_bins) - np.log1p(chi_squared(p))
            assert abs(lhs - rhs) < 1e-12

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_h2_identity_property(self, seed):
        p = random_pmf(np.random.default_rng(seed), n=240)
        lhs = renyi(p, 2.0)
        rhs = np.log(p.N_bins) - np.log1p(chi_squared(p))
        assert abs(lhs - rhs) < 1e-12

    def test_parseval_against_fft_oracle(self):
        rng = np.random.default_rng(89)
        for _ in range(100):
            p = random_pmf(rng)
            full = np.abs(np.fft.fft(p.p)) ** 2  # |F_k|^2, k = 0..N-1
            lhs = full.sum()
            rhs = p.N_bins * (p.p**2).sum()
            assert abs(lhs - rhs) < 1e-10 * max(1.0, rhs)


class TestNearUniform:
    def test_uniform(self):
        r = near_uniform_expansion(uniform_pmf())
        assert abs(r["H1_quadratic"] - np.log(720.0)) < 1e-12
        assert r["delta_l2"] < 1e-15
        assert abs(r["third_order_term"]) < 1e-15

    def test_quadratic_tracks_shannon(self):
        rng = np.random.default_rng(97)
        n = N
        for _ in range(20):
            d = rng.standard_normal(n)
            d -= d.mean()
            d *= 8e-4 / np.sqrt((d * d).sum())
            p = pmf(1.0 / n + d)
            r = near_uniform_expansion(p)
            bound = (n**2 / 6.0) * np.abs(d**3).sum() \
                + 10.0 * n**3 * (d**4).sum()
            assert abs(shannon(p) - r["H1_quadratic"]) <= bound


class TestEntropyReport:
    def test_real_balanced_mode(self):
        # the antisymmetric eigenvector (1,-1)/sqrt2 is the two-lobe one;
        # its partner (1,1)/sqrt2 is a single-atom phase set
        modes = two_level_modes(TwoLevelParams(0.0, 1.0, 0.0))
        m = next(m for m in modes if m.eigen_k.real < 0.0)
        s = extract_phases(m)
        rep = entropy_report(s)
        assert rep.S_folded == 0.0
        assert abs(rep.S_unfolded - np.log(2.0)) < 1e-9
        assert abs(rep.S_value - np.log(51.0)) < 1e-9
        assert not rep.degenerate_alignment
        assert rep.fourier_source == "sample"
        assert abs(rep.uncertainty_sum - (rep.S_folded + rep.S_value)) < 1e-15
        assert abs(rep.S_folded_differential
                   - (rep.S_folded + np.log(TWO_PI / 720))) < 1e-15

    def test_ep_mode_flags_degenerate(self):
        m = two_level_modes(TwoLevelParams(0.0, 1.0, 2.0))[0]
        rep = entropy_report(extract_phases(m))
        assert rep.degenerate_alignment
        assert np.isfinite(rep.S_folded)

    def test_binned_source(self):
        m = two_level_modes(TwoLevelParams(0.4, 1.0, 1.0))[0]
        rep = entropy_report(extract_phases(m), fourier_source="binned")
        assert rep.fourier_source == "binned"
        with pytest.raises(ValueError):
            entropy_report(extract_phases(m), fourier_source="dft")

    def test_renyi_map_keys(self):
        m = two_level_modes(TwoLevelParams(0.4, 1.0, 1.0))[0]
        rep = entropy_report(extract_phases(m), alphas=(1.0, 1.5, 2.0))
        assert set(rep.renyi) == {1.0, 1.5, 2.0}
        assert rep.renyi[1.0] == rep.S_folded
