"""Epoch-synchronous sonority feature extraction.

Per glottal cycle, seven features are derived from three views of the speech
signal: the HNGD spectrum of a zero-time-windowed segment (formant peak
amplitudes, deviations, valleys, slopes and bandwidths: f1-f5), the Hilbert
envelope of the LP residual (peak-to-sidelobe excitation strength: f6), and
multi-pitch-period correlation (f7).  The dimensions are min-max normalized
and fused with weights proportional to their average inter-class symmetric
KLD.
"""

from .corpus import (LabelSpan, SonorantClass, Utterance, load_class_overrides,
                     load_utterance, mix_noise, peak_normalize, phone_to_class,
                     resample_to_8k, save_wav, save_wav_float, white_noise)
from .epochs import (EpochTrain, detect_epochs, epochs_from_utterance,
                     refine_epochs_to_he_peaks, zff_filter)
from .formants import (FormantSet, NormStats, apply_normalizer, compute_f1,
                       compute_f2, compute_f3, compute_f4, compute_f5,
                       find_peaks_valleys, fit_normalizer, pairwise_correlation)
from .fusion import (ClassStats, WeightVector, assemble_weighted, average_kld,
                     compute_weights, fit_class_gaussians, frame_aggregate,
                     kld_symmetric)
from .hngd import (HngdSpectrum, ZtwWindow, dngd, envelope_of_sequence,
                   hngd_at_epoch, make_ztw_window, ngd_spectrum, window_segment)
from .pipeline import PipelineConfig, extract_corpus, extract_utterance
from .source import (HilbertEnvelope, LpFrameConfig, hilbert_envelope,
                     lp_coefficients, lp_residual, soe_f6)
from .supra import PitchCycleSet, extract_cycles, f7_correlation, sweep_k
from .synth import SynthSpec, continuum_corpus, synth, vowel_corpus

__version__ = "0.1.0"
