"""Sweep orchestration: grids, tracking, records, peaks, locking."""

import numpy as np
import pytest

from epmodes.linalg import NoConvergence
from epmodes.models import TwoLevelParams, two_level_modes
from epmodes.sweep import (
    AmbiguousTracking,
    ModeDiagnostics,
    NoInteriorPeak,
    PeakReport,
    SweepConfig,
    SweepRecord,
    anchored_grid,
    detect_peaks,
    field_series,
    locking_report,
    mode_diagnostics,
    run_sweep,
    track_modes,
)

LN2 = float(np.log(2.0))


def stub_row(**kw):
    base = dict(re_eigenvalue=1.0, im_eigenvalue=0.0, R1=0.0, R2=1.0,
                r_abs=1.0, K=1.0, S_folded=0.0, S_unfolded=LN2,
                S_value=0.0, uncertainty_sum=0.0,
                renyi={1.0: 0.0, 1.5: 0.25}, chi_squared=0.0,
                degenerate_alignment=False)
    base.update(kw)
    return ModeDiagnostics(**base)


def stub_records(values, field="S_folded"):
    return [SweepRecord(float(i), [stub_row(**{field: v})])
            for i, v in enumerate(values)]


class TestAnchoredGrid:
    def test_27_point_range(self):
        grid = anchored_grid(0.10, 0.23, 0.005)
        assert grid.size == 27
        assert np.allclose(grid[0], 0.10, atol=1e-15)
        assert np.allclose(grid[-1], 0.23, atol=1e-15)
        assert np.all(np.diff(grid) > 0.0)

    def test_zero_lands_exactly_on_grid(self):
        grid = anchored_grid(-1.0, 1.0, 0.005)
        assert grid.size == 401
        assert grid[200] == 0.0

    def test_single_point(self):
        assert anchored_grid(0.1, 0.1004, 0.005).size == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            anchored_grid(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            anchored_grid(1.0, 0.0, 0.1)


class TestSweepConfig:
    def test_valid_two_level(self):
        cfg = SweepConfig("two_level", anchored_grid(-1.0, 1.0, 0.1),
                          gamma=2.0)
        assert cfg.m == 2 and cfg.alphas == (1.0, 1.5, 2.0)

    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([0.0, 0.0, 0.1]))
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([]))

    def test_model_and_m(self):
        with pytest.raises(ValueError):
            SweepConfig("ring", np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([0.0, 1.0]), m=1)
        with pytest.raises(ValueError):
            SweepConfig("cavity", np.array([0.1, 0.2]), m=0)

    def test_cavity_grid_vetted_against_geometry(self):
        with pytest.raises(ValueError):
            SweepConfig("cavity", np.array([0.1, 0.6]))  # eps >= 0.5

    def test_analysis_settings(self):
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([0.0, 1.0]), alphas=())
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([0.0, 1.0]),
                        alphas=(1.0, -2.0))
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([0.0, 1.0]), N_bins=1)
        with pytest.raises(ValueError):
            SweepConfig("two_level", np.array([0.0, 1.0]), node_cutoff=1.0)


class TestTrackModes:
    def test_identity(self):
        modes = two_level_modes(TwoLevelParams(0.3, 1.0, 1.0))
        assert list(track_modes(modes, modes)) == [0, 1]

    def test_reversal(self):
        modes = two_level_modes(TwoLevelParams(0.3, 1.0, 1.0))
        assert list(track_modes(modes, modes[::-1])) == [1, 0]

    def test_ambiguous_duplicates(self):
        m = two_level_modes(TwoLevelParams(0.3, 1.0, 1.0))[0]
        with pytest.raises(AmbiguousTracking):
            track_modes([m, m], [m, m])

    def test_length_mismatch(self):
        modes = two_level_modes(TwoLevelParams(0.3, 1.0, 1.0))
        with pytest.raises(ValueError):
            track_modes(modes, modes[:1])

    def test_weak_damping_real_parts_repel_imag_cross(self):
        # gamma < 2g: tracked branches keep a real gap >= 2 sqrt(g^2 -
        # gamma^2/4) while the imaginary parts swap sides across zero
        # detuning
        grid = anchored_grid(-0.5, 0.5, 0.05)
        cfg = SweepConfig("two_level", grid, gamma=1.0)
        recs = run_sweep(cfg)
        re_gap = []
        im_diff = []
        for r in recs:
            assert r.error is None and not r.track_ambiguous
            re_gap.append(abs(r.modes[0].re_eigenvalue
                              - r.modes[1].re_eigenvalue))
            im_diff.append(r.modes[0].im_eigenvalue
                           - r.modes[1].im_eigenvalue)
        assert min(re_gap) >= 2.0 * np.sqrt(1.0 - 0.25) - 1e-9
        assert im_diff[0] * im_diff[-1] < 0.0


@pytest.fixture(scope="module")
def ep_records():
    cfg = SweepConfig("two_level", anchored_grid(-1.0, 1.0, 0.01),
                      gamma=2.0, alphas=(1.0, 1.25, 1.5, 1.75, 2.0))
    return run_sweep(cfg)


class TestRunSweepTwoLevelEP:
    def test_k_maximal_at_zero_detuning(self, ep_records):
        entry = detect_peaks(ep_records, "K")
        assert entry.raw_argmax == 0.0
        assert entry.height == float("inf")
        assert entry.refined_argmax == entry.raw_argmax

    def test_r2_minimal_at_zero_detuning(self, ep_records):
        params, vals = field_series(ep_records, "R2")
        assert params[int(np.argmin(vals))] == 0.0
        assert vals.min() < 1e-12

    def test_row_identities(self, ep_records):
        for r in ep_records:
            assert r.error is None
            for row in r.modes:
                assert abs(row.r_abs - row.R2) <= 1e-8
                if row.R2 > 1e-5:
                    assert abs(row.K * row.R2**2 - 1.0) <= 1e-8

    def test_locking_of_k_and_folded_entropy(self, ep_records):
        rep = locking_report(ep_records, fields=("K", "S_folded"),
                             alphas=(1.0, 1.25, 1.5, 1.75, 2.0))
        assert rep.locked
        assert rep.max_separation_steps <= 1.0 + 1e-9
        assert abs(rep.step - 0.01) < 1e-12

    def test_value_entropy_peaks_at_boundary(self, ep_records):
        # the spectral line count collapses at the degeneracy, so S_value
        # grows away from it and tops out at the sweep edge
        with pytest.raises(NoInteriorPeak):
            detect_peaks(ep_records, "S_value")

    def test_uncertainty_sum_does_not_lock(self, ep_records):
        rep = locking_report(ep_records,
                             fields=("K", "uncertainty_sum"))
        assert not rep.locked

    def test_degenerate_flag_only_near_ep(self, ep_records):
        flagged = [r.parameter for r in ep_records
                   if any(m.degenerate_alignment for m in r.modes)]
        assert 0.0 in flagged
        assert all(abs(p) <= 0.02 for p in flagged)

    def test_bitwise_determinism(self, ep_records):
        cfg = SweepConfig("two_level", anchored_grid(-1.0, 1.0, 0.01),
                          gamma=2.0, alphas=(1.0, 1.25, 1.5, 1.75, 2.0))
        again = run_sweep(cfg)
        assert len(again) == len(ep_records)
        for a, b in zip(ep_records, again):
            assert a.parameter == b.parameter
            assert a.error == b.error
            assert a.track_ambiguous == b.track_ambiguous
            for ma, mb in zip(a.modes, b.modes):
                assert ma == mb  # dataclass equality: all floats bitwise


class TestRunSweepCavityBaseline:
    def test_closed_sweep_hermitian_pattern(self):
        # dipole-type branch: real spectrum, rigid phases, two balanced
        # lobes; also exercises tracking across deformed grids
        cfg = SweepConfig("cavity", np.array([0.10, 0.12, 0.14]), m=1,
                          h=0.05, k_target=3.8)
        recs = run_sweep(cfg)
        assert len(recs) == 3
        for r in recs:
            assert r.error is None
            row = r.modes[0]
            assert abs(row.im_eigenvalue) <= 1e-8
            assert row.R2 >= 1.0 - 1e-6
            assert row.S_folded <= 0.05
            assert abs(row.S_unfolded - LN2) <= 0.05
            assert row.R1 <= 0.2


class TestErrorRows:
    def test_solver_failure_marks_row_and_sweep_continues(self, monkeypatch):
        import epmodes.sweep as sweep_mod
        real = two_level_modes

        def flaky(params):
            if params.delta == 0.0:
                raise NoConvergence(17, 1e-3)
            return real(params)

        monkeypatch.setattr(sweep_mod, "two_level_modes", flaky)
        cfg = SweepConfig("two_level", anchored_grid(-0.2, 0.2, 0.1),
                          gamma=1.0)
        recs = run_sweep(cfg)
        assert [r.parameter for r in recs] == [-0.2, -0.1, 0.0, 0.1, 0.2]
        bad = recs[2]
        assert bad.error is not None and "NoConvergence" in bad.error
        assert bad.modes == []
        for r in recs[:2] + recs[3:]:
            assert r.error is None and len(r.modes) == 2
        _, vals = field_series(recs, "R2")
        assert np.isnan(vals[2]) and np.isfinite(vals[[0, 1, 3, 4]]).all()


class TestDetectPeaks:
    def test_symmetric_triple(self):
        entry = detect_peaks(stub_records([1.0, 3.0, 1.0]), "S_folded")
        assert entry.raw_argmax == 1.0
        assert entry.refined_argmax == 1.0
        assert entry.height == 3.0

    def test_asymmetric_triple_refinement(self):
        # vertex of the parabola through (0,1),(1,3),(2,2)
        entry = detect_peaks(stub_records([1.0, 3.0, 2.0]), "S_folded")
        assert entry.raw_argmax == 1.0
        assert abs(entry.refined_argmax - 7.0 / 6.0) < 1e-12

    def test_monotone_raises(self):
        with pytest.raises(NoInteriorPeak):
            detect_peaks(stub_records([1.0, 2.0, 3.0]), "S_folded")

    def test_constant_raises(self):
        with pytest.raises(NoInteriorPeak):
            detect_peaks(stub_records([1.0, 1.0, 1.0]), "S_folded")

    def test_too_few_records(self):
        with pytest.raises(ValueError):
            detect_peaks(stub_records([1.0, 2.0]), "S_folded")

    def test_unknown_field_named(self):
        with pytest.raises(ValueError, match="no_such_field"):
            detect_peaks(stub_records([1.0, 3.0, 1.0]), "no_such_field")

    def test_renyi_field_accessor(self):
        recs = stub_records([1.0, 3.0, 1.0])
        _, vals = field_series(recs, "renyi_1.5")
        assert np.allclose(vals, 0.25)
        with pytest.raises(ValueError):
            field_series(recs, "renyi_7")

    def test_error_rows_excluded_from_argmax(self):
        recs = stub_records([1.0, 3.0, 2.0, 1.5, 1.0])
        recs[1] = SweepRecord(1.0, [], "NoConvergence: stub")
        entry = detect_peaks(recs, "S_folded")
        assert entry.raw_argmax == 2.0

    def test_all_nan_rejected(self):
        recs = [SweepRecord(float(i), [], "err") for i in range(4)]
        with pytest.raises(ValueError):
            detect_peaks(recs, "S_folded")


class TestLockingReport:
    def test_synthetic_lock(self):
        recs = stub_records([1.0, 3.0, 1.0])
        for i, r in enumerate(recs):
            row = stub_row(S_folded=r.modes[0].S_folded,
                           S_unfolded=[0.1, 0.4, 0.2][i])
            recs[i] = SweepRecord(r.parameter, [row])
        rep = locking_report(recs, fields=("S_folded", "S_unfolded"))
        assert isinstance(rep, PeakReport)
        assert rep.max_separation_steps == 0.0
        assert rep.locked
        assert rep.pairwise[("S_folded", "S_unfolded")] == 0.0

    def test_constant_field_propagates(self):
        recs = stub_records([1.0, 3.0, 1.0])
        with pytest.raises(NoInteriorPeak):
            locking_report(recs, fields=("S_folded", "S_value"))

    def test_no_fields_rejected(self):
        with pytest.raises(ValueError):
            locking_report(stub_records([1.0, 3.0, 1.0]), fields=())


class TestSweepRecordInvariant:
    def test_inconsistent_k_r2_rejected(self):
        with pytest.raises(ValueError):
            SweepRecord(0.0, [stub_row(K=4.0, R2=1.0)])

    def test_flagged_infinite_k_allowed_when_r2_tiny(self):
        SweepRecord(0.0, [stub_row(K=float("inf"), R2=1e-9, r_abs=0.0,
                                   degenerate_alignment=True)])


class TestModeDiagnostics:
    def test_two_level_row_contents(self):
        m = two_level_modes(TwoLevelParams(1.0, 1.0, 2.0))[0]
        row = mode_diagnostics(m, alphas=(1.0, 2.0))
        assert row.re_eigenvalue == complex(m.eigen_k).real
        assert set(row.renyi) == {1.0, 2.0}
        assert row.renyi[1.0] == row.S_folded
        assert abs(row.uncertainty_sum
                   - (row.S_folded + row.S_value)) < 1e-15
