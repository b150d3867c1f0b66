"""Benchmark harness: Wilson intervals, LER runs, thresholds, histograms."""

import math

import numpy as np
import pytest

from nmwpm.bench import (BASELINE_TAG, NEURAL_TAG, HIST_HEADER, RESULTS_HEADER,
                         BaselineDecoder, BenchResult, NeuralDecoder,
                         NoCrossing, ThresholdEstimate, estimate_threshold,
                         export_histogram, histogram_rows_from_counts,
                         read_results_csv, run_ler, wilson_ci,
                         write_histogram_csv, write_results_csv)
from nmwpm.lattice import build_rotated, build_toric
from nmwpm.matching import Matching
from nmwpm.noise import INDEPENDENT
from nmwpm.qwp import QwpConfig, QwpParams

Z95 = 1.959963984540054


def wilson_oracle(failures, shots):
    # Independent derivation: the Wilson bounds are the roots of the score
    # equation (phat-p)^2 * n = z^2 p(1-p), a quadratic in p.
    phat = failures / shots
    roots = np.roots([shots + Z95**2, -(2 * shots * phat + Z95**2),
                      shots * phat * phat])
    return tuple(sorted(roots.real))


class TestWilson:
    @pytest.mark.parametrize("failures,shots", [(13, 100), (0, 50), (50, 50),
                                                (144, 100000), (1, 3)])
    def test_matches_score_equation_roots(self, failures, shots):
        lo, hi = wilson_ci(failures, shots)
        olo, ohi = wilson_oracle(failures, shots)
        assert math.isclose(lo, olo, abs_tol=1e-12)
        assert math.isclose(hi, ohi, abs_tol=1e-12)

    def test_contains_point_estimate(self):
        for failures, shots in [(0, 10), (3, 17), (9, 10), (10, 10)]:
            lo, hi = wilson_ci(failures, shots)
            assert lo <= failures / shots <= hi
            assert 0.0 <= lo <= hi <= 1.0

    def test_width_shrinks_like_inverse_sqrt_shots(self):
        # Same rate, 100x the shots -> ~10x narrower.
        w1 = np.diff(wilson_ci(100, 10**4))[0]
        w2 = np.diff(wilson_ci(10000, 10**6))[0]
        assert w1 / w2 == pytest.approx(10.0, rel=0.05)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            wilson_ci(1, 0)
        with pytest.raises(ValueError):
            wilson_ci(5, 3)


class TestBenchResult:
    def test_fields_and_derived(self):
        r = BenchResult(BASELINE_TAG, "toric", 6, "independent", 0.08,
                        2000, 73)
        assert r.ler == 73 / 2000
        lo, hi = r.wilson_ci
        assert lo <= r.ler <= hi

    def test_rejects_failures_above_shots(self):
        with pytest.raises(ValueError):
            BenchResult(BASELINE_TAG, "toric", 6, "independent", 0.08, 10, 11)

    def test_csv_roundtrip(self, tmp_path):
        rs = [BenchResult(BASELINE_TAG, "toric", 6, "independent", 0.08,
                          2000, 73),
              BenchResult(NEURAL_TAG, "rotated", 5, "depolarizing", 0.1,
                          500, 9)]
        path = tmp_path / "results.csv"
        write_results_csv(path, rs)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(RESULTS_HEADER)
        assert read_results_csv(path) == rs

    def test_read_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_results_csv(path)


class TestRunLer:
    def test_p_zero_gives_zero_ler(self):
        dec = BaselineDecoder()
        for lat in (build_toric(4), build_rotated(3)):
            r = run_ler(dec, lat, INDEPENDENT, 0.0, 50, seed=3)
            assert r.logical_failures == 0
            assert r.ler == 0.0
            assert r.decoder == BASELINE_TAG
            assert (r.code, r.L) == (lat.kind, lat.L)

    def test_monotone_in_p(self):
        # 274 vs 1808 failures at these seeds; far outside noise.
        dec = BaselineDecoder()
        lat = build_toric(4)
        lo = run_ler(dec, lat, INDEPENDENT, 0.04, 3000, seed=11)
        hi = run_ler(dec, lat, INDEPENDENT, 0.12, 3000, seed=11)
        assert lo.logical_failures < hi.logical_failures

    def test_larger_distance_wins_below_threshold(self):
        dec = BaselineDecoder()
        r4 = run_ler(dec, build_toric(4), INDEPENDENT, 0.05, 4000, seed=11)
        r6 = run_ler(dec, build_toric(6), INDEPENDENT, 0.05, 4000, seed=11)
        assert r6.ler < r4.ler
        assert r6.wilson_ci[1] < r4.wilson_ci[0]  # non-overlapping

    def test_thread_count_does_not_change_counts(self):
        dec = BaselineDecoder()
        lat = build_toric(4)
        seq = run_ler(dec, lat, INDEPENDENT, 0.08, 600, seed=5, threads=1)
        par = run_ler(dec, lat, INDEPENDENT, 0.08, 600, seed=5, threads=2)
        assert seq == par

    def test_bad_correction_is_caught(self):
        # The harness asserts every correction zeroes the syndrome; a decoder
        # that drops defects must crash, not miscount.
        class Broken:
            tag = "broken"

            def match(self, syndrome, lattice, noise_kind):
                return Matching(())

        lat = build_toric(4)
        with pytest.raises(ValueError, match="syndrome"):
            run_ler(Broken(), lat, INDEPENDENT, 0.3, 20, seed=2)

    def test_neural_decoder_runs_and_counts(self):
        config = QwpConfig(d_hidden=8, L_layers=2, K=2, L_enc=1, d_pe=8)
        lat = build_toric(4)
        params = QwpParams.init(config, lat, seed=0)
        r = run_ler(NeuralDecoder(params), lat, INDEPENDENT, 0.06, 25, seed=9)
        assert r.decoder == NEURAL_TAG
        assert 0 <= r.logical_failures <= 25

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            run_ler(BaselineDecoder(), build_toric(4), INDEPENDENT, 0.1, 0, 1)


def synthetic_curve(L, slope, grid, crossing=0.103, shots=10**6,
                    scale=0.1, tag=BASELINE_TAG):
    # Exactly log-linear LER curves all meeting at `crossing`; log-linear
    # interpolation recovers the crossing up to failure-count rounding.
    return [BenchResult(tag, "toric", L, "independent", p, shots,
                        round(scale * math.exp(slope * (p - crossing)) * shots))
            for p in grid]


GRID = (0.085, 0.095, 0.105, 0.115)


class TestThreshold:
    def test_recovers_known_crossing(self):
        rs = synthetic_curve(6, 8.0, GRID) + synthetic_curve(8, 16.0, GRID)
        est = estimate_threshold(rs)
        assert est.p_th == pytest.approx(0.103, abs=1e-4)
        assert est.spread == 0.0
        assert est.degenerate_pairs == 0
        assert len(est.crossings) == 1

    def test_three_distances_mean_and_spread(self):
        # L6/L8 cross at 0.102; L10 is built off L8 to cross it at 0.104.
        rs = (synthetic_curve(6, 8.0, GRID, crossing=0.102)
              + synthetic_curve(8, 16.0, GRID, crossing=0.102))
        l8 = {r.p: r.ler for r in rs if r.L == 8}
        l10 = [BenchResult(BASELINE_TAG, "toric", 10, "independent", p, 10**6,
                           round(l8[p] * math.exp(24.0 * (p - 0.104)) * 10**6))
               for p in GRID]
        est = estimate_threshold(rs + l10)
        assert len(est.crossings) == 2
        assert est.crossings[0] == pytest.approx(0.102, abs=2e-4)
        assert est.crossings[1] == pytest.approx(0.104, abs=2e-4)
        assert est.p_th == pytest.approx(0.103, abs=2e-4)
        assert est.spread == pytest.approx(0.001, abs=2e-4)

    def test_no_crossing_raises(self):
        rs = (synthetic_curve(6, 8.0, GRID)
              + synthetic_curve(8, 8.0, GRID, scale=0.2))  # parallel, offset
        with pytest.raises(NoCrossing):
            estimate_threshold(rs)

    def test_identical_curves_flagged_not_averaged(self):
        rs = synthetic_curve(6, 8.0, GRID) + synthetic_curve(8, 8.0, GRID)
        with pytest.raises(NoCrossing, match="coincide"):
            estimate_threshold(rs)

    def test_degenerate_pair_excluded_from_mean(self):
        rs = synthetic_curve(6, 8.0, GRID) + synthetic_curve(8, 16.0, GRID)
        twin = [BenchResult(BASELINE_TAG, "toric", 10, r.noise, r.p, r.shots,
                            r.logical_failures) for r in rs if r.L == 8]
        est = estimate_threshold(rs + twin)
        assert est.degenerate_pairs == 1
        assert len(est.crossings) == 1
        assert est.p_th == pytest.approx(0.103, abs=1e-4)

    def test_zero_failure_points_floored_not_fatal(self):
        rs = synthetic_curve(6, 8.0, GRID) + synthetic_curve(8, 16.0, GRID)
        rs[0] = BenchResult(BASELINE_TAG, "toric", 6, "independent",
                            GRID[0], 10**6, 0)
        est = estimate_threshold(rs)
        assert 0.08 < est.p_th < 0.12

    def test_grid_validation(self):
        rs6 = synthetic_curve(6, 8.0, GRID)
        with pytest.raises(ValueError, match="2 code distances"):
            estimate_threshold(rs6)
        with pytest.raises(ValueError, match="4 shared p-points"):
            estimate_threshold(rs6[:3] + synthetic_curve(8, 16.0, GRID)[:3])
        mixed = rs6 + synthetic_curve(8, 16.0, GRID, tag=NEURAL_TAG)
        with pytest.raises(ValueError, match="homogeneous"):
            estimate_threshold(mixed)
        with pytest.raises(ValueError, match="duplicate"):
            estimate_threshold(rs6 + synthetic_curve(8, 16.0, GRID)
                               + rs6[:1])


class TestHistogram:
    def test_point_mass_density(self):
        rows = export_histogram(np.full(1000, 0.5), 10)
        assert len(rows) == 10
        for lo, hi, density in rows:
            if lo <= 0.5 < hi:
                assert density == pytest.approx(10.0)
            else:
                assert density == 0.0

    def test_empty_input_zero_rows(self):
        assert export_histogram([], 10) == []

    def test_uniform_approaches_one(self):
        rng = np.random.default_rng(4)
        rows = export_histogram(rng.random(200_000), 10)
        for _, _, density in rows:
            assert density == pytest.approx(1.0, abs=0.05)

    def test_density_integrates_to_one(self):
        rng = np.random.default_rng(5)
        for bins in (2, 7, 20):
            rows = export_histogram(rng.beta(0.3, 0.3, size=512), bins)
            total = sum(density * (hi - lo) for lo, hi, density in rows)
            assert total == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            export_histogram([0.5], 1)
        with pytest.raises(ValueError):
            export_histogram([1.5], 10)

    def test_counts_variant_matches(self):
        rng = np.random.default_rng(6)
        p = rng.random(1000)
        counts, _ = np.histogram(p, bins=8, range=(0.0, 1.0))
        assert histogram_rows_from_counts(counts) == export_histogram(p, 8)

    def test_histogram_csv(self, tmp_path):
        path = tmp_path / "hist.csv"
        write_histogram_csv(path, export_histogram(np.full(10, 0.5), 4))
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(HIST_HEADER)
        assert len(lines) == 5
        lo, hi, density = (float(v) for v in lines[3].split(","))
        assert (lo, hi, density) == (0.5, 0.75, 4.0)
