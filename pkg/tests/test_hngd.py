import math

import numpy as np
import pytest

from sonofeat.corpus import Utterance
from sonofeat.hngd import (SegmentOutOfBounds, dngd, envelope_of_sequence,
                           hngd_at_epoch, make_ztw_window, ngd_spectrum,
                           window_segment, write_spectrum_csv, write_spectrum_npz)
from sonofeat.synth import SynthSpec, synth

FS = 8000


def closed_form_weights(n_samples):
    w = [0.0]
    for n in range(1, n_samples):
        w.append(1.0 / (4.0 * math.sin(math.pi * n / (2.0 * n_samples)) ** 2))
    return np.array(w)


class TestZtwWindow:
    @pytest.mark.parametrize("n", [4, 40, 128])
    def test_matches_closed_form(self, n):
        win = make_ztw_window(n)
        np.testing.assert_allclose(win.weights, closed_form_weights(n),
                                   rtol=0, atol=1e-12)
        assert win.weights[0] == 0.0

    def test_n4_values(self):
        w = make_ztw_window(4).weights
        np.testing.assert_allclose(
            w, [0.0, 1.7071067811865475, 0.5, 0.2928932188134525], atol=1e-12)

    def test_strictly_decreasing(self):
        for n in (4, 16, 40, 200):
            w = make_ztw_window(n).weights
            assert np.all(np.diff(w[1:]) < 0)
            assert w[1] > w[n - 1]

    def test_n40_first_weight(self):
        # 1 / (4 sin^2(pi/80)) evaluated independently
        expected = 1.0 / (4.0 * math.sin(math.pi / 80.0) ** 2)
        assert abs(make_ztw_window(40).weights[1] - expected) < 1e-12
        assert abs(expected - 162.1972529) < 1e-6

    def test_too_small(self):
        with pytest.raises(ValueError):
            make_ztw_window(3)


class TestWindowSegment:
    def test_constant_signal_yields_weights(self):
        utt = Utterance(np.ones(100), FS)
        seg = window_segment(utt, 10, 40)
        np.testing.assert_allclose(seg, make_ztw_window(40).weights)

    def test_zero_signal(self):
        utt = Utterance(np.zeros(100), FS)
        assert np.all(window_segment(utt, 0, 40) == 0)

    def test_impulse_at_epoch_annihilated(self):
        x = np.zeros(100)
        x[10] = 1.0
        seg = window_segment(Utterance(x, FS), 10, 40)
        assert np.all(seg == 0)

    def test_out_of_bounds(self):
        with pytest.raises(SegmentOutOfBounds):
            window_segment(Utterance(np.ones(50), FS), 20, 40)


class TestNgd:
    @pytest.mark.parametrize("m", range(6))
    def test_delta_family_flat(self, m):
        x = np.zeros(16)
        x[m] = 1.0
        g = ngd_spectrum(x, 256)
        np.testing.assert_allclose(g, float(m), atol=1e-9)

    def test_too_long_segment(self):
        with pytest.raises(ValueError):
            ngd_spectrum(np.ones(300), 256)


class TestDngd:
    def test_constant_zero(self):
        np.testing.assert_allclose(dngd(np.full(50, 3.7)), 0.0, atol=1e-12)

    def test_linear_zero(self):
        np.testing.assert_allclose(dngd(np.arange(50, dtype=float)), 0.0,
                                   atol=1e-12)

    def test_negated_parabola(self):
        k = np.arange(50, dtype=float)
        np.testing.assert_allclose(dngd(-k * k), 2.0, atol=1e-9)


class TestEnvelope:
    def test_cosine_unit_modulus(self):
        nfft = 512
        k = np.arange(nfft)
        d = np.cos(2 * np.pi * k * 8 / nfft)
        env = envelope_of_sequence(d)
        np.testing.assert_allclose(env, 1.0, atol=1e-6)

    def test_zero(self):
        assert np.all(envelope_of_sequence(np.zeros(64)) == 0)

    def test_sign_symmetric(self):
        rng = np.random.default_rng(0)
        d = rng.standard_normal(128)
        np.testing.assert_allclose(envelope_of_sequence(-d),
                                   envelope_of_sequence(d), atol=1e-12)

    def test_dominates_magnitude(self):
        rng = np.random.default_rng(1)
        d = rng.standard_normal(256)
        env = envelope_of_sequence(d)
        eps = 1e-9 * np.max(np.abs(d))
        assert np.all(env >= np.abs(d) - eps)


class TestHngdAtEpoch:
    def test_single_resonance_argmax(self):
        utt, gt = synth(SynthSpec(120.0, [(800, 80, 1.0)], 0.3), seed=0)
        spec = hngd_at_epoch(utt, int(gt[5]))
        peak_hz = np.argmax(spec.magnitudes) * spec.bin_hz
        assert abs(peak_hz - 800) <= 50

    def test_three_formant_recovery(self):
        from sonofeat.formants import find_peaks_valleys
        utt, gt = synth(SynthSpec(
            120.0, [(700, 90, 1.0), (1220, 80, 0.8), (2600, 110, 0.6)], 0.4),
            seed=1)
        hits = 0
        for e in gt[3:13]:
            fset = find_peaks_valleys(hngd_at_epoch(utt, int(e)))
            if np.all(np.abs(fset.freq - [700, 1220, 2600]) <= 60):
                hits += 1
        assert hits >= 9

    def test_silence_zero_spectrum(self):
        utt = Utterance(np.zeros(1000), FS)
        spec = hngd_at_epoch(utt, 100)
        assert np.all(spec.magnitudes == 0)

    def test_scaling_ratio_constant(self, clean_vowel):
        utt, gt = clean_vowel
        e = int(gt[10])
        base = hngd_at_epoch(utt, e).magnitudes
        scaled = hngd_at_epoch(Utterance(utt.samples * 2.0, utt.fs), e).magnitudes
        mask = base > np.max(base) * 1e-6
        ratios = scaled[mask] / base[mask]
        assert np.argmax(scaled) == np.argmax(base)
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-9)

    def test_spectrum_length_and_sign(self, clean_vowel):
        utt, gt = clean_vowel
        spec = hngd_at_epoch(utt, int(gt[4]))
        assert len(spec.magnitudes) == spec.nfft // 2 + 1
        assert np.all(spec.magnitudes >= 0)


class TestDumps:
    def test_csv_and_npz(self, tmp_path, clean_vowel):
        utt, gt = clean_vowel
        spectra = [hngd_at_epoch(utt, int(e)) for e in gt[2:4]]
        csv_path = tmp_path / "spec.csv"
        write_spectrum_csv(csv_path, spectra)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "epoch_sample,bin_hz,magnitude"
        assert len(lines) == 1 + 2 * len(spectra[0].magnitudes)
        npz_path = tmp_path / "spec.npz"
        write_spectrum_npz(npz_path, spectra)
        data = np.load(npz_path)
        assert set(data.files) == {"epoch_sample", "bin_hz", "magnitude"}
        assert len(data["magnitude"]) == 2 * len(spectra[0].magnitudes)
