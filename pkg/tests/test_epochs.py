import numpy as np
import pytest

from sonofeat.corpus import Utterance
from sonofeat.epochs import (EpochTrain, detect_epochs, epochs_from_utterance,
                             refine_epochs_to_he_peaks, write_epochs_ascii,
                             write_epochs_json, zff_filter,
                             zff_resonator_response)
from sonofeat.source import hilbert_envelope, lp_residual
from sonofeat.synth import SynthSpec, synth

FS = 8000


class TestZff:
    def test_resonator_response_at_pi(self):
        assert abs(zff_resonator_response(np.pi) - 0.25) < 1e-12

    def test_dc_removed(self):
        utt = Utterance(np.full(4000, 0.5), FS)
        z, guard = zff_filter(utt)
        assert np.max(np.abs(z[guard:-guard])) < 1e-6

    def test_linearity(self, natural_vowel):
        utt, _ = natural_vowel
        z1, _ = zff_filter(utt)
        scaled = Utterance(utt.samples * 3.5, utt.fs)
        z2, _ = zff_filter(scaled)
        # cumulative sums round differently under scaling; errors stay at
        # the double-integrator's working magnitude times machine epsilon
        atol = 1e-9 * np.max(np.abs(z1))
        np.testing.assert_allclose(z2, 3.5 * z1, atol=atol)

    def test_too_short_signal(self):
        with pytest.raises(ValueError):
            zff_filter(Utterance(np.ones(50), FS))

    def test_impulse_train_crossings_near_impulses(self):
        # damped-resonator pulses at 120 Hz: rising crossings within 0.5 ms
        spec = SynthSpec(120.0, [(500, 100, 1.0)], 0.5)
        utt, gt = synth(spec, seed=2)
        z, guard = zff_filter(utt)
        train = detect_epochs(z, FS, guard)
        tol = 0.0005 * FS
        near = sum(1 for e in train.indices if np.min(np.abs(gt - e)) <= tol)
        assert near / len(train) >= 0.95


class TestDetect:
    def test_sine_crossings_every_80(self):
        t = np.arange(4000) / FS
        z = np.sin(2 * np.pi * 100 * t)
        train = detect_epochs(z, FS)
        gaps = np.diff(train.indices)
        assert np.all(np.abs(gaps - 80) <= 1)

    def test_all_positive_empty(self):
        train = detect_epochs(np.ones(1000), FS)
        assert len(train) == 0

    def test_polarity_duality(self):
        rng = np.random.default_rng(4)
        z = np.cumsum(rng.standard_normal(2000))
        z -= z.mean()
        rising = detect_epochs(z, FS, polarity="rising").indices
        falling_of_neg = detect_epochs(-z, FS, polarity="falling").indices
        np.testing.assert_array_equal(rising, falling_of_neg)

    def test_median_gap_matches_pitch(self, natural_vowel):
        utt, _ = natural_vowel
        train = epochs_from_utterance(utt)
        med = np.median(np.diff(train.indices))
        assert abs(med - FS / 120.0) <= 1.0

    def test_monotonicity_invariant(self, natural_vowel):
        utt, _ = natural_vowel
        train = epochs_from_utterance(utt)
        assert np.all(np.diff(train.indices) > 0)

    def test_strictly_increasing_enforced(self):
        with pytest.raises(ValueError):
            EpochTrain(np.array([10, 10, 20]), FS)


class TestRefine:
    def test_fixed_point(self):
        he = np.zeros(1000)
        epochs = np.array([100, 300, 500])
        he[epochs] = 1.0
        train = EpochTrain(epochs, FS)
        refined = refine_epochs_to_he_peaks(train, he)
        np.testing.assert_array_equal(refined.indices, epochs)

    def test_shift_to_peak(self):
        he = np.zeros(1000)
        he[103] = 1.0
        train = EpochTrain(np.array([100]), FS)
        refined = refine_epochs_to_he_peaks(train, he)
        assert refined.indices[0] == 103

    def test_collision_keeps_earlier(self):
        he = np.zeros(1000)
        he[105] = 1.0
        train = EpochTrain(np.array([100, 104]), FS)
        refined = refine_epochs_to_he_peaks(train, he)
        np.testing.assert_array_equal(refined.indices, [105])

    def test_synthetic_vowel_accuracy(self, natural_vowel):
        utt, gt = natural_vowel
        train = epochs_from_utterance(utt)
        he = hilbert_envelope(lp_residual(utt), utt.fs)
        refined = refine_epochs_to_he_peaks(train, he.values)
        tol = 0.00025 * utt.fs
        near = sum(1 for e in refined.indices if np.min(np.abs(gt - e)) <= tol)
        assert near / len(refined) >= 0.95


class TestExport:
    def test_ascii_and_json(self, tmp_path):
        train = EpochTrain(np.array([80, 160, 240]), FS)
        write_epochs_ascii(tmp_path / "e.txt", train)
        assert (tmp_path / "e.txt").read_text() == "80\n160\n240\n"
        write_epochs_json(tmp_path / "e.json", train)
        import json
        payload = json.loads((tmp_path / "e.json").read_text())
        assert payload["samples"] == [80, 160, 240]
        assert payload["seconds"] == [0.01, 0.02, 0.03]
        assert payload["fs"] == FS
