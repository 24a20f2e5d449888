"""Glottal closure instant (epoch) detection via zero-frequency filtering.

The speech signal is differenced once, passed twice through the ideal
zero-frequency resonator y[n] = 2 y[n-1] - y[n-2] + x[n] (a double cumulative
sum), and trend-removed after each pass plus once more at the end.  Epochs are
the rising zero crossings of the trend-removed output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import Utterance

#: trend-removal window as a multiple of the average pitch period
TREND_FACTOR = 1.5
TREND_PASSES = 3


@dataclass
class EpochTrain:
    """Strictly increasing sample indices of glottal closure instants."""

    indices: np.ndarray
    fs: int
    #: guard region (samples) at each signal edge where detection is blind
    edge_guard: int = 0

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if len(self.indices) > 1 and np.any(np.diff(self.indices) <= 0):
            raise ValueError("epoch indices must be strictly increasing")

    def __len__(self):
        return len(self.indices)

    @property
    def seconds(self) -> np.ndarray:
        return self.indices / self.fs

    def gaps_ms(self) -> np.ndarray:
        return np.diff(self.indices) * 1000.0 / self.fs


def zff_resonator_response(w) -> np.ndarray:
    """Magnitude response |H(w)| = 1 / (4 sin^2(w/2)) of one ideal
    zero-frequency resonator stage applied to the differenced signal."""
    w = np.asarray(w, dtype=np.float64)
    return 1.0 / (4.0 * np.sin(w / 2.0) ** 2)


def average_pitch_period(x: np.ndarray, fs: int) -> int:
    """Average pitch period in samples, from the autocorrelation peak of the
    full signal in the 2-20 ms lag range.  Degenerate signals fall back to
    10 ms."""
    n = len(x)
    lo = int(round(0.002 * fs))
    hi = min(int(round(0.020 * fs)), n - 1)
    fallback = int(round(0.010 * fs))
    if hi <= lo:
        return fallback
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(x, nfft)
    r = np.fft.irfft(spec * np.conj(spec))[:n]
    window = r[lo:hi + 1]
    if not np.any(window > 0):
        return fallback
    return lo + int(np.argmax(window))


def _subtract_local_mean(y: np.ndarray, half: int) -> np.ndarray:
    """Remove the running mean over a window of 2*half+1 samples; windows are
    clipped (not padded) at the signal edges."""
    n = len(y)
    csum = np.concatenate(([0.0], np.cumsum(y)))
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    return y - (csum[hi] - csum[lo]) / (hi - lo)


def zff_filter(u: Utterance, trend_factor: float = TREND_FACTOR,
               trend_passes: int = TREND_PASSES) -> tuple[np.ndarray, int]:
    """Zero-frequency filter ``u``; returns (zff signal, edge guard length).

    The trend window is ``trend_factor`` times the average pitch period; one
    trend-removal pass follows each resonator stage and remaining passes run
    at the end, which keeps the double-integrator growth in check.
    """
    x = u.samples
    period = average_pitch_period(x, u.fs)
    half = max(1, int(round(trend_factor * period / 2.0)))
    guard = 2 * half + 1
    if len(x) <= 2 * guard:
        raise ValueError("signal too short for the trend-removal window")
    y = np.diff(x, prepend=x[0])
    passes = 0
    for _ in range(2):
        y = np.cumsum(np.cumsum(y))
        y = _subtract_local_mean(y, half)
        passes += 1
    while passes < trend_passes:
        y = _subtract_local_mean(y, half)
        passes += 1
    return y, guard


def detect_epochs(zff: np.ndarray, fs: int, edge_guard: int = 0,
                  polarity: str = "rising") -> EpochTrain:
    """Epochs as zero crossings of a trend-removed ZFF signal.

    ``polarity='rising'`` takes negative-to-positive crossings (the default
    convention); ``'falling'`` flips it for reversed-polarity recordings.
    The first/last ``edge_guard`` samples are excluded.
    """
    z = np.asarray(zff, dtype=np.float64)
    if polarity == "falling":
        z = -z
    elif polarity != "rising":
        raise ValueError(f"unknown polarity {polarity!r}")
    idx = np.nonzero((z[:-1] < 0) & (z[1:] >= 0))[0] + 1
    if edge_guard > 0:
        idx = idx[(idx >= edge_guard) & (idx < len(z) - edge_guard)]
    return EpochTrain(idx, fs, edge_guard)


def epochs_from_utterance(u: Utterance, polarity: str = "rising",
                          trend_factor: float = TREND_FACTOR,
                          trend_passes: int = TREND_PASSES) -> EpochTrain:
    zff, guard = zff_filter(u, trend_factor, trend_passes)
    return detect_epochs(zff, u.fs, guard, polarity)


def refine_epochs_to_he_peaks(train: EpochTrain, he: np.ndarray) -> EpochTrain:
    """Move each epoch to the largest local maximum of the Hilbert envelope
    within +-1 ms; collisions keep the earlier epoch."""
    half = int(round(0.001 * train.fs))
    n = len(he)
    refined: list[int] = []
    for e in train.indices:
        lo = max(0, e - half)
        hi = min(n, e + half + 1)
        seg = he[lo:hi]
        if len(seg) == 0:
            continue
        best = -1
        best_val = -np.inf
        for k in range(len(seg)):
            left = seg[k - 1] if k > 0 else (he[lo - 1] if lo > 0 else -np.inf)
            right = seg[k + 1] if k + 1 < len(seg) else (he[hi] if hi < n else -np.inf)
            if seg[k] >= left and seg[k] >= right and seg[k] > best_val:
                best, best_val = k, seg[k]
        if best < 0:
            best = int(np.argmax(seg))
        cand = lo + best
        if not refined or cand > refined[-1]:
            refined.append(cand)
    return EpochTrain(np.array(refined, dtype=np.int64), train.fs, train.edge_guard)


def write_epochs_ascii(path, train: EpochTrain) -> None:
    """One sample index per line."""
    with open(path, "w") as fh:
        for idx in train.indices:
            fh.write(f"{int(idx)}\n")


def write_epochs_json(path, train: EpochTrain) -> None:
    payload = {
        "fs": train.fs,
        "samples": [int(i) for i in train.indices],
        "seconds": [float(t) for t in train.seconds],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
