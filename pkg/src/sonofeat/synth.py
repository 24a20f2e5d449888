"""Synthetic test-signal generation: impulse-excited resonator cascades with
known ground-truth excitation instants, plus corpus builders for the
acceptance experiments.

Excitation impulses are negative, matching the glottal-flow-derivative
polarity at closure, so the default rising-crossing epoch convention applies
to the synthesized signals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .corpus import SONORANT_CLASSES, SonorantClass, Utterance


@dataclass
class SynthSpec:
    """Parameters of one synthetic voiced sound."""

    pitch: float
    formants: list[tuple[float, float, float]]  # (freq Hz, bandwidth Hz, gain)
    duration: float
    jitter: float = 0.0          # fractional pitch perturbation
    noise_floor: float = 0.0     # linear amplitude of additive noise
    fs: int = 8000
    excitation_smear: float = 0.0  # one-pole smoothing coefficient in [0, 1)

    def __post_init__(self):
        if not 50.0 <= self.pitch <= 500.0:
            raise ValueError("pitch must be in [50, 500] Hz")
        if self.duration * self.pitch <= 3:
            raise ValueError("duration must exceed 3 pitch periods")
        for f, bw, _ in self.formants:
            if f >= self.fs / 2:
                raise ValueError(f"formant {f} Hz at/above Nyquist")
            if bw <= 0:
                raise ValueError("bandwidth must be positive")
        if not 0.0 <= self.excitation_smear < 1.0:
            raise ValueError("excitation_smear must be in [0, 1)")


def resonator_coefficients(freq: float, bw: float, fs: int):
    """Second-order resonator (impulse-invariant form): y[n] = a x[n]
    + b y[n-1] + c y[n-2]."""
    t = 1.0 / fs
    c = -np.exp(-2.0 * np.pi * bw * t)
    b = 2.0 * np.exp(-np.pi * bw * t) * np.cos(2.0 * np.pi * freq * t)
    a = 1.0 - b - c
    return a, b, c


def synth(spec: SynthSpec, seed: int = 0) -> tuple[Utterance, np.ndarray]:
    """Render the synthesis parameters; returns (utterance, ground-truth
    epoch indices).

    The impulse train is jittered per period, optionally smoothed by a
    one-pole filter (duller glottal closure), passed through the resonator
    cascade, noise added, and the result peak-normalized.
    """
    rng = np.random.default_rng(seed)
    n = int(round(spec.duration * spec.fs))
    period = spec.fs / spec.pitch
    x = np.zeros(n)
    epochs = []
    pos = period
    while pos < n - 1:
        k = int(round(pos))
        x[k] = -1.0
        epochs.append(k)
        pos += period * (1.0 + spec.jitter * rng.uniform(-1.0, 1.0))
    if spec.excitation_smear > 0:
        x = sps.lfilter([1.0 - spec.excitation_smear],
                        [1.0, -spec.excitation_smear], x)
    y = x
    for freq, bw, gain in spec.formants:
        a, b, c = resonator_coefficients(freq, bw, spec.fs)
        y = sps.lfilter([a], [1.0, -b, -c], y) * gain
    if spec.noise_floor > 0:
        y = y + spec.noise_floor * rng.standard_normal(n)
    peak = np.max(np.abs(y))
    if peak > 0:
        y = y / peak
    return Utterance(y, spec.fs, utt_id=f"synth{seed}"), np.asarray(epochs, dtype=np.int64)


def sample_vowel_spec(rng: np.random.Generator, duration: float = 0.5,
                      jitter: float = 0.005, noise_floor: float = 1e-5,
                      min_separation: float = 350.0) -> SynthSpec:
    """Random three-formant vowel with formants drawn from the standard
    F1/F2/F3 ranges.  Formants closer than ``min_separation`` merge under any
    5 ms estimator, so the draw enforces that margin."""
    f1 = rng.uniform(280.0, 850.0)
    f2 = rng.uniform(max(f1 + min_separation, 950.0), 2150.0)
    f3 = rng.uniform(max(f2 + min_separation, 2250.0), 3150.0)
    b1, b2, b3 = rng.uniform(60.0, 200.0, 3)
    pitch = rng.uniform(100.0, 140.0)
    return SynthSpec(pitch, [(f1, b1, 1.0), (f2, b2, 1.0), (f3, b3, 1.0)],
                     duration, jitter=jitter, noise_floor=noise_floor)


def vowel_corpus(n_utts: int = 20, seed: int = 0, duration: float = 0.5):
    """Seeded corpus of random synthetic vowels; yields
    (utterance, ground-truth epochs, spec)."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_utts):
        spec = sample_vowel_spec(rng, duration)
        utt, gt = synth(spec, seed=seed * 1000 + i)
        utt.utt_id = f"vowel{i:02d}"
        out.append((utt, gt, spec))
    return out


#: Prototype parameters for the graded six-class continuum, ordered from the
#: most sonorous (low-vowel-like) to the least (nasal-like).  Formant
#: bandwidth widens, the relative gain of the higher formants drops (overall
#: gain would cancel under peak normalization), excitation sharpness drops,
#: and cycle-to-cycle regularity (jitter/noise) degrades monotonically.
CONTINUUM = [
    # class                    F1    F2    F3    bw   g2    g3    jitter noise smear
    (SonorantClass.LOW_VOWEL, 750, 1300, 2550, 62.0, 0.95, 0.90, 0.002, 0.003, 0.00),
    (SonorantClass.MID_VOWEL, 620, 1500, 2600, 72.0, 0.84, 0.77, 0.006, 0.006, 0.07),
    (SonorantClass.HIGH_VOWEL, 480, 1700, 2650, 92.0, 0.73, 0.64, 0.014, 0.012, 0.17),
    (SonorantClass.GLIDE, 460, 1150, 2450, 107.0, 0.59, 0.48, 0.018, 0.016, 0.23),
    (SonorantClass.LIQUID, 420, 1350, 2700, 119.0, 0.51, 0.38, 0.023, 0.020, 0.31),
    (SonorantClass.NASAL, 380, 1050, 2350, 140.0, 0.40, 0.25, 0.034, 0.030, 0.40),
]


def continuum_spec(cls: SonorantClass, rng: np.random.Generator,
                   duration: float = 0.4) -> SynthSpec:
    row = next(r for r in CONTINUUM if r[0] is cls)
    _, f1, f2, f3, bw, g2, g3, jitter, noise, smear = row
    freqs = np.array([f1, f2, f3]) * rng.uniform(0.97, 1.03, 3)
    bws = bw * np.array([1.0, 1.15, 1.3]) * rng.uniform(0.92, 1.08, 3)
    gains = np.array([1.0, g2, g3])
    pitch = rng.uniform(100.0, 140.0)
    return SynthSpec(pitch, list(zip(freqs, bws, gains)), duration,
                     jitter=jitter * rng.uniform(0.75, 1.25),
                     noise_floor=noise * rng.uniform(0.75, 1.25),
                     excitation_smear=smear)


def continuum_corpus(utts_per_class: int = 10, seed: int = 0,
                     duration: float = 0.4):
    """Six-class synthetic sonority continuum; yields
    (utterance, ground-truth epochs, class)."""
    rng = np.random.default_rng(seed)
    out = []
    for cls in SONORANT_CLASSES:
        for i in range(utts_per_class):
            spec = continuum_spec(cls, rng, duration)
            utt, gt = synth(spec, seed=int(rng.integers(0, 2 ** 31)))
            utt.utt_id = f"{cls.label}_{i:02d}"
            out.append((utt, gt, cls))
    return out
