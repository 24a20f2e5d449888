import numpy as np
import pytest

from sonofeat.formants import (FormantSet, NormStats, TooFewPeaks,
                               apply_normalizer, compute_f1, compute_f2,
                               compute_f3, compute_f4, compute_f5,
                               find_peaks_valleys, fit_normalizer,
                               load_norm_stats, pairwise_correlation,
                               save_norm_stats)
from sonofeat.hngd import HngdSpectrum, hngd_at_epoch
from sonofeat.synth import SynthSpec, synth

FS, NFFT = 8000, 2048
BINHZ = FS / NFFT


def spectrum_from(mag):
    return HngdSpectrum(np.asarray(mag, dtype=np.float64), FS, NFFT, 0)


def gaussian_bump(freqs, center, width, height):
    return height * np.exp(-0.5 * ((freqs - center) / width) ** 2)


def three_gaussian_spectrum(centers=(700, 1220, 2600), width=60,
                            heights=(1.0, 0.7, 0.4)):
    freqs = np.arange(NFFT // 2 + 1) * BINHZ
    mag = np.full_like(freqs, 1e-6)
    for c, h in zip(centers, heights):
        mag = mag + gaussian_bump(freqs, c, width, h)
    return spectrum_from(mag)


def toy_formant_set():
    return FormantSet(freq=np.array([700.0, 1220.0, 2600.0]),
                      peak=np.array([0.9, 0.6, 0.3]),
                      valley_freq=np.array([500.0, 1120.0, 2500.0]),
                      valley=np.array([0.3, 0.2, 0.1]))


class TestFindPeaksValleys:
    def test_three_gaussians_recovered(self):
        fset = find_peaks_valleys(three_gaussian_spectrum())
        np.testing.assert_allclose(fset.freq, [700, 1220, 2600], atol=BINHZ)

    def test_monotone_spectrum_fails(self):
        mag = np.linspace(1.0, 0.0, NFFT // 2 + 1)
        with pytest.raises(TooFewPeaks):
            find_peaks_valleys(spectrum_from(mag))

    def test_all_zero_fails(self):
        with pytest.raises(TooFewPeaks):
            find_peaks_valleys(spectrum_from(np.zeros(NFFT // 2 + 1)))

    def test_synthetic_vowel_f1_band(self):
        utt, gt = synth(SynthSpec(
            120.0, [(550, 80, 1.0), (1800, 90, 0.7), (2600, 120, 0.5)], 0.4),
            seed=9)
        fset = find_peaks_valleys(hngd_at_epoch(utt, int(gt[6])))
        assert 400 <= fset.freq[0] <= 800
        assert fset.valley[0] < fset.peak[0]

    def test_invariants(self):
        fset = find_peaks_valleys(three_gaussian_spectrum())
        assert np.all(fset.valley_freq < fset.freq)
        assert np.all(fset.valley <= fset.peak)
        assert fset.freq[0] < fset.freq[1] < fset.freq[2]


class TestFeatureArithmetic:
    def test_f1_mean(self):
        assert compute_f1(toy_formant_set()) == pytest.approx(0.6)

    def test_f1_equal_peaks(self):
        fset = toy_formant_set()
        fset.peak = np.array([0.4, 0.4, 0.4])
        assert compute_f1(fset) == pytest.approx(0.4)

    def test_f2_difference_mean(self):
        assert compute_f2(toy_formant_set()) == pytest.approx(0.3)

    def test_f2_equal_peaks_zero(self):
        fset = toy_formant_set()
        fset.peak = np.array([0.5, 0.5, 0.5])
        assert compute_f2(fset) == 0.0

    def test_f2_algebraic_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            fset = toy_formant_set()
            fset.peak = rng.uniform(0, 1, 3)
            assert compute_f2(fset) == pytest.approx(
                (fset.peak[0] - fset.peak[2]) / 2.0)

    def test_f3_mean_valleys(self):
        assert compute_f3(toy_formant_set()) == pytest.approx(0.2)

    def test_f3_zero_valleys(self):
        fset = toy_formant_set()
        fset.valley = np.zeros(3)
        assert compute_f3(fset) == 0.0

    def test_f3_never_exceeds_f1(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            fset = toy_formant_set()
            fset.peak = rng.uniform(0.5, 1.0, 3)
            fset.valley = fset.peak * rng.uniform(0, 1, 3)
            assert compute_f3(fset) <= compute_f1(fset)

    def test_f4_slopes(self):
        fset = FormantSet(freq=np.array([700.0, 1200.0, 2600.0]),
                          peak=np.array([0.5, 0.4, 0.2]),
                          valley_freq=np.array([500.0, 1100.0, 2500.0]),
                          valley=np.array([0.1, 0.2, 0.1]))
        # P-Q = (0.4, 0.2, 0.1), F-V = (200, 100, 100)
        assert compute_f4(fset) == pytest.approx((0.002 + 0.002 + 0.001) / 3)

    def test_f4_flat_is_zero(self):
        fset = toy_formant_set()
        fset.valley = fset.peak.copy()
        assert compute_f4(fset) == 0.0

    def test_f4_coincident_frequencies_error(self):
        fset = toy_formant_set()
        fset.valley_freq = fset.freq.copy()
        with pytest.raises(ValueError):
            compute_f4(fset)


class TestBandwidth:
    def test_lorentzian_half_power_width(self):
        freqs = np.arange(NFFT // 2 + 1) * BINHZ
        gamma = 50.0  # half half-power width; full width 100 Hz
        mag = 1.0 / (1.0 + ((freqs - 1000.0) / gamma) ** 2) + 1e-9
        extra = gaussian_bump(freqs, 2000, 40, 0.5) + gaussian_bump(
            freqs, 3000, 40, 0.25)
        spec = spectrum_from(mag + extra)
        fset = find_peaks_valleys(spec)
        f5, bws = compute_f5(spec, fset)
        # 10log10 crossing sits at mag 10^-0.3, marginally inside 2*gamma
        assert abs(bws[0] - 100.0) <= BINHZ + 0.3

    def test_symmetric_peak_widths_equal(self):
        freqs = np.arange(NFFT // 2 + 1) * BINHZ
        mag = (gaussian_bump(freqs, 1000, 80, 1.0)
               + gaussian_bump(freqs, 2000, 80, 0.6)
               + gaussian_bump(freqs, 3000, 80, 0.3) + 1e-9)
        spec = spectrum_from(mag)
        fset = find_peaks_valleys(spec)
        _, bws = compute_f5(spec, fset)
        for i, center in enumerate((1000, 2000, 3000)):
            b = int(round(center / BINHZ))
            logmag = 10 * np.log10(mag)
            thr = logmag[b] - 3
            left = next(k for k in range(b, -1, -1) if logmag[k] <= thr)
            right = next(k for k in range(b, len(mag)) if logmag[k] <= thr)
            assert abs((b - left) - (right - b)) <= 1

    def test_merged_peaks_edge_at_local_min(self):
        freqs = np.arange(NFFT // 2 + 1) * BINHZ
        # two close bumps whose saddle stays above the -3 dB threshold
        mag = (gaussian_bump(freqs, 900, 120, 1.0)
               + gaussian_bump(freqs, 1150, 120, 0.95)
               + gaussian_bump(freqs, 2500, 60, 0.5)
               + gaussian_bump(freqs, 3400, 60, 0.4) + 1e-9)
        spec = spectrum_from(mag)
        fset = find_peaks_valleys(spec)
        f5, bws = compute_f5(spec, fset)
        assert np.all(bws > 0)
        assert np.all(np.isfinite(bws))


class TestNormalizer:
    def test_midpoint(self):
        stats = fit_normalizer(np.array([[2.0], [4.0], [6.0]]))
        assert apply_normalizer(np.array([[4.0]]), stats)[0, 0] == pytest.approx(0.5)

    def test_min_and_max(self):
        stats = fit_normalizer(np.array([[2.0], [6.0]]))
        out = apply_normalizer(np.array([[2.0], [6.0]]), stats)
        assert out[0, 0] == 0.0 and out[1, 0] == 1.0

    def test_clamping(self):
        stats = fit_normalizer(np.array([[0.0], [1.0]]))
        out = apply_normalizer(np.array([[2.0], [-1.0]]), stats)
        assert out[0, 0] == 1.0 and out[1, 0] == 0.0

    def test_constant_dimension_rejected(self):
        with pytest.raises(ValueError):
            fit_normalizer(np.array([[1.0, 2.0], [1.0, 3.0]]))

    def test_idempotent_on_unit_stats(self):
        rng = np.random.default_rng(8)
        rows = rng.uniform(0, 1, (50, 3))
        unit = NormStats(["a", "b", "c"], np.zeros(3), np.ones(3))
        once = apply_normalizer(rows, unit)
        np.testing.assert_allclose(apply_normalizer(once, unit), once)

    def test_json_roundtrip(self, tmp_path):
        stats = fit_normalizer(np.array([[1.0, -2.0], [3.0, 5.0]]), ["x", "y"])
        save_norm_stats(tmp_path / "norm.json", stats)
        back = load_norm_stats(tmp_path / "norm.json")
        assert back.names == ["x", "y"]
        np.testing.assert_allclose(back.mins, stats.mins)
        np.testing.assert_allclose(back.maxs, stats.maxs)


class TestPairwiseCorrelation:
    def test_self_correlation_unit(self):
        rng = np.random.default_rng(3)
        cols = rng.standard_normal((100, 3))
        corr = pairwise_correlation(cols)
        np.testing.assert_allclose(np.diag(corr), 1.0)

    def test_exact_linear_pair(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(60)
        cols = np.column_stack([x, 2 * x + 1])
        corr = pairwise_correlation(cols)
        assert corr[0, 1] == pytest.approx(1.0)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        corr = pairwise_correlation(rng.standard_normal((200, 5)))
        np.testing.assert_allclose(corr, corr.T)

    def test_requires_30_rows(self):
        with pytest.raises(ValueError):
            pairwise_correlation(np.random.default_rng(0).standard_normal((10, 2)))

    def test_constant_column_rejected(self):
        cols = np.column_stack([np.ones(40), np.arange(40.0)])
        with pytest.raises(ValueError):
            pairwise_correlation(cols)
