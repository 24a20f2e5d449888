import numpy as np
import pytest
from scipy import signal as sps

from sonofeat.corpus import Utterance
from sonofeat.epochs import EpochTrain, epochs_from_utterance, refine_epochs_to_he_peaks
from sonofeat.source import (HilbertEnvelope, LpFrameConfig, SingularFrame,
                             hilbert_envelope, inverse_filter, lp_coefficients,
                             lp_residual, soe_f6)
from sonofeat.synth import SynthSpec, synth

FS = 8000


class TestLpCoefficients:
    def test_ar2_recovery(self):
        # white noise through the known AR(2) synthesis filter
        rng = np.random.default_rng(0)
        a_true = np.array([1.2, -0.72])
        x = sps.lfilter([1.0], np.concatenate(([1.0], -a_true)),
                        rng.standard_normal(10000))
        a_est = lp_coefficients(x, 2)
        np.testing.assert_allclose(a_est, a_true, atol=0.05)

    def test_dc_frame_singular(self):
        with pytest.raises(SingularFrame):
            lp_coefficients(np.full(200, 0.7), 10)

    def test_silence_singular(self):
        with pytest.raises(SingularFrame):
            lp_coefficients(np.zeros(200), 10)

    def test_order_zero_identity(self):
        a = lp_coefficients(np.random.default_rng(1).standard_normal(100), 0)
        assert len(a) == 0
        x = np.arange(5.0)
        np.testing.assert_allclose(inverse_filter(x, a), x)

    def test_minimum_phase(self):
        rng = np.random.default_rng(2)
        frame = sps.lfilter([1.0], [1.0, -1.2, 0.72], rng.standard_normal(400))
        a = lp_coefficients(frame, 10)
        roots = np.roots(np.concatenate(([1.0], -a)))
        assert np.all(np.abs(roots) < 1.0)


class TestLpResidual:
    def test_zero_signal(self):
        res = lp_residual(Utterance(np.zeros(4000), FS))
        assert np.all(res == 0)

    def test_length_preserved(self, natural_vowel):
        utt, _ = natural_vowel
        assert len(lp_residual(utt)) == len(utt.samples)

    def test_excitation_positions_recovered(self):
        utt, gt = synth(SynthSpec(110.0, [(700, 120, 1.0), (1900, 150, 0.6)],
                                  0.4), seed=4)
        res = lp_residual(utt)
        he = hilbert_envelope(res, FS).values
        for e in gt[3:-3]:
            window = he[e - 3:e + 4]
            local_peak = e - 3 + int(np.argmax(window))
            assert abs(local_peak - e) <= 1

    def test_residual_energy_below_signal(self, natural_vowel):
        utt, _ = natural_vowel
        res = lp_residual(utt)
        assert np.sum(res ** 2) <= np.sum(utt.samples ** 2)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LpFrameConfig(frame_ms=1.0, shift_ms=0.5, order=10, fs=FS)
        with pytest.raises(ValueError):
            LpFrameConfig(frame_ms=10.0, shift_ms=20.0, order=5, fs=FS)


class TestHilbertEnvelope:
    def test_cosine_unit_envelope(self):
        t = np.arange(FS) / FS
        env = hilbert_envelope(np.cos(2 * np.pi * 500 * t), FS).values
        guard = 400
        np.testing.assert_allclose(env[guard:-guard], 1.0, atol=1e-3)

    def test_zero(self):
        assert np.all(hilbert_envelope(np.zeros(100), FS).values == 0)

    def test_sign_invariant(self):
        rng = np.random.default_rng(5)
        e = rng.standard_normal(500)
        np.testing.assert_allclose(hilbert_envelope(-e, FS).values,
                                   hilbert_envelope(e, FS).values, atol=1e-12)

    def test_dominates_signal(self):
        rng = np.random.default_rng(6)
        e = rng.standard_normal(1000)
        env = hilbert_envelope(e, FS).values
        assert np.all(env >= np.abs(e) - 1e-9 * np.max(np.abs(e)))


class TestSoeF6:
    def _envelope_with_segment(self, center_peak, tail_value):
        # 3 ms segment: 12 samples each side at 8 kHz
        v = np.full(400, 0.5)
        e = 200
        v[e] = center_peak
        v[e + 4:e + 13] = tail_value  # the +0.5..+1.5 ms third
        return HilbertEnvelope(v, FS), EpochTrain(np.array([e]), FS)

    def test_constructed_ratio(self):
        he, train = self._envelope_with_segment(1.0, 0.2)
        vals, ok = soe_f6(he, train)
        assert ok[0]
        assert vals[0] == pytest.approx(5.0)

    def test_flat_segment_unity(self):
        he = HilbertEnvelope(np.full(400, 0.7), FS)
        train = EpochTrain(np.array([200]), FS)
        vals, ok = soe_f6(he, train)
        assert ok[0]
        assert vals[0] == pytest.approx(1.0)

    def test_out_of_bounds_invalid(self):
        he = HilbertEnvelope(np.ones(100), FS)
        train = EpochTrain(np.array([5]), FS)
        _, ok = soe_f6(he, train)
        assert not ok[0]

    def test_peak_to_sidelobe_at_least_one(self, natural_vowel):
        utt, _ = natural_vowel
        train = epochs_from_utterance(utt)
        he = hilbert_envelope(lp_residual(utt), utt.fs)
        train = refine_epochs_to_he_peaks(train, he.values)
        vals, ok = soe_f6(he, train)
        assert np.all(vals[ok] >= 1.0 - 1e-12)

    def test_amplitude_invariance(self, natural_vowel):
        utt, _ = natural_vowel
        base_vals = None
        for scale in (0.1, 1.0, 10.0):
            scaled = Utterance(utt.samples * scale, utt.fs)
            train = epochs_from_utterance(scaled)
            he = hilbert_envelope(lp_residual(scaled), scaled.fs)
            train = refine_epochs_to_he_peaks(train, he.values)
            vals, ok = soe_f6(he, train)
            if base_vals is None:
                base_vals = vals[ok]
            else:
                np.testing.assert_allclose(vals[ok], base_vals, rtol=1e-9)

    def test_outer_mode(self):
        he, train = self._envelope_with_segment(1.0, 0.2)
        vals, ok = soe_f6(he, train, mode="outer")
        assert ok[0]
        # outer mode averages both outer thirds: left third still at 0.5
        assert vals[0] < 5.0

    def test_residual_envelope_sharper_than_raw(self, natural_vowel):
        utt, _ = natural_vowel
        res_env = hilbert_envelope(lp_residual(utt), utt.fs).values
        raw_env = hilbert_envelope(utt.samples, utt.fs).values
        guard = 200
        def peak_to_mean(v):
            v = v[guard:-guard]
            return np.max(v) / np.mean(v)
        assert peak_to_mean(res_env) > peak_to_mean(raw_env)
