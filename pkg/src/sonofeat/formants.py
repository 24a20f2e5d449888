"""Formant peak/valley measurements on HNGD spectra and the five
vocal-tract features: mean peak amplitude, peak deviation, valley amplitude,
peak slope, and 3 dB bandwidth, with corpus min-max normalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .hngd import HngdSpectrum

PEAK_BAND_HZ = (90.0, 4000.0)
MIN_PEAK_SEPARATION_HZ = 150.0


class TooFewPeaks(Exception):
    """Fewer than three qualifying spectral peaks; the feature row is
    invalid and excluded from statistics."""


@dataclass
class FormantSet:
    """First three spectral peaks with their preceding valleys.

    Arrays indexed 0..2: peak frequency ``freq`` (Hz), peak magnitude
    ``peak``, valley frequency ``valley_freq`` (Hz), valley magnitude
    ``valley``, slope ``slope`` (magnitude per Hz), 3 dB bandwidth ``bw``
    (Hz, filled by :func:`compute_f5`).
    """

    freq: np.ndarray
    peak: np.ndarray
    valley_freq: np.ndarray
    valley: np.ndarray

    @property
    def slope(self) -> np.ndarray:
        return (self.peak - self.valley) / (self.freq - self.valley_freq)


def _parabolic_refine(mag: np.ndarray, b: int) -> float:
    """Sub-bin peak position by fitting a parabola through the peak bin and
    its neighbors."""
    if b <= 0 or b >= len(mag) - 1:
        return float(b)
    y0, y1, y2 = mag[b - 1], mag[b], mag[b + 1]
    den = y0 - 2.0 * y1 + y2
    if den == 0:
        return float(b)
    return b + 0.5 * (y0 - y2) / den


def find_peaks_valleys(spec: HngdSpectrum) -> FormantSet:
    """Three largest-prominence local maxima in the 90-4000 Hz band with at
    least 150 Hz separation (ties to the lower frequency), in ascending
    order; valley i is the global minimum between peak i-1 (0 Hz for i=1)
    and peak i."""
    mag = spec.magnitudes
    if not np.any(mag):
        raise TooFewPeaks("all-zero spectrum")
    binhz = spec.bin_hz
    lo = int(np.ceil(PEAK_BAND_HZ[0] / binhz))
    hi = min(int(np.floor(PEAK_BAND_HZ[1] / binhz)), len(mag) - 1)
    cand, _ = sps.find_peaks(mag[: hi + 1])
    cand = cand[cand >= lo]
    if len(cand) < 3:
        raise TooFewPeaks(f"found {len(cand)} peaks in band")
    prom = sps.peak_prominences(mag[: hi + 1], cand)[0]
    # stable greedy selection: by descending prominence, lower bin on ties
    order = sorted(range(len(cand)), key=lambda i: (-prom[i], cand[i]))
    min_sep = MIN_PEAK_SEPARATION_HZ / binhz
    chosen: list[int] = []
    for i in order:
        if all(abs(cand[i] - c) >= min_sep for c in chosen):
            chosen.append(int(cand[i]))
        if len(chosen) == 3:
            break
    if len(chosen) < 3:
        raise TooFewPeaks("fewer than three separable peaks")
    chosen.sort()
    freq = np.array([_parabolic_refine(mag, b) * binhz for b in chosen])
    peak = mag[chosen]
    vfreq = np.empty(3)
    vmag = np.empty(3)
    prev = 0
    for i, b in enumerate(chosen):
        lo_b = prev + 1 if i > 0 else 0
        seg = mag[lo_b:b]
        k = int(np.argmin(seg))
        vfreq[i] = (lo_b + k) * binhz
        vmag[i] = seg[k]
        prev = b
    return FormantSet(freq, peak, vfreq, vmag)


def compute_f1(fset: FormantSet) -> float:
    """Mean amplitude of the first three spectral peaks."""
    return float(np.mean(fset.peak))


def compute_f2(fset: FormantSet) -> float:
    """Mean of the successive peak-amplitude differences, equal to
    (P1 - P3) / 2."""
    d1 = fset.peak[0] - fset.peak[1]
    d2 = fset.peak[1] - fset.peak[2]
    return float((d1 + d2) / 2.0)


def compute_f3(fset: FormantSet) -> float:
    """Mean amplitude of the valleys preceding the three peaks."""
    return float(np.mean(fset.valley))


def compute_f4(fset: FormantSet) -> float:
    """Mean peak-to-preceding-valley slope."""
    if np.any(fset.freq == fset.valley_freq):
        raise ValueError("coincident peak and valley frequency")
    return float(np.mean(fset.slope))


def _bandwidth_edge(logmag: np.ndarray, peak_bin: int, thr: float,
                    step: int) -> float:
    """Walk outward from the peak until the log spectrum drops 3 dB; if it
    re-rises first (merged peaks) the edge is that local minimum.  Returns a
    fractional bin (linear interpolation at the crossing)."""
    k = peak_bin
    while True:
        nxt = k + step
        if nxt < 0 or nxt >= len(logmag):
            return float(k)
        if logmag[nxt] <= thr:
            # crossing between k and nxt
            span = logmag[k] - logmag[nxt]
            frac = (logmag[k] - thr) / span if span > 0 else 0.0
            return k + step * frac
        if logmag[nxt] > logmag[k] and k != peak_bin:
            return float(k)
        k = nxt


def compute_f5(spec: HngdSpectrum, fset: FormantSet) -> tuple[float, np.ndarray]:
    """Mean 3 dB bandwidth of the three peaks, measured on the
    10 log10 spectrum; returns (f5, per-peak bandwidths in Hz)."""
    mag = spec.magnitudes
    binhz = spec.bin_hz
    eps = np.max(mag) * 1e-12
    logmag = 10.0 * np.log10(np.maximum(mag, eps))
    bws = np.empty(3)
    for i in range(3):
        b = int(round(fset.freq[i] / binhz))
        b = min(max(b, 0), len(mag) - 1)
        if mag[b] <= 0:
            raise ValueError("zero magnitude at peak")
        thr = logmag[b] - 3.0
        left = _bandwidth_edge(logmag, b, thr, -1)
        right = _bandwidth_edge(logmag, b, thr, +1)
        bws[i] = (right - left) * binhz
    return float(np.mean(bws)), bws


@dataclass
class NormStats:
    """Per-dimension min-max statistics for [0, 1] scaling."""

    names: list[str]
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        self.mins = np.asarray(self.mins, dtype=np.float64)
        self.maxs = np.asarray(self.maxs, dtype=np.float64)
        if np.any(self.maxs <= self.mins):
            raise ValueError("max must exceed min for every dimension")


def fit_normalizer(rows: np.ndarray, names: list[str] | None = None) -> NormStats:
    """Min-max statistics over all rows jointly (one row per epoch, one
    column per feature dimension)."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError("need at least two feature rows")
    mins = rows.min(axis=0)
    maxs = rows.max(axis=0)
    if np.any(maxs <= mins):
        bad = [i for i in range(rows.shape[1]) if maxs[i] <= mins[i]]
        raise ValueError(f"constant feature dimension(s): {bad}")
    if names is None:
        names = [f"f{i + 1}" for i in range(rows.shape[1])]
    return NormStats(list(names), mins, maxs)


def apply_normalizer(rows: np.ndarray, stats: NormStats) -> np.ndarray:
    """Scale to [0, 1]; out-of-range values (unseen at fit time) clamp."""
    rows = np.asarray(rows, dtype=np.float64)
    scaled = (rows - stats.mins) / (stats.maxs - stats.mins)
    return np.clip(scaled, 0.0, 1.0)


def save_norm_stats(path, stats: NormStats) -> None:
    payload = [
        {"dim": name, "min": float(lo), "max": float(hi)}
        for name, lo, hi in zip(stats.names, stats.mins, stats.maxs)
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_norm_stats(path) -> NormStats:
    with open(path) as fh:
        payload = json.load(fh)
    return NormStats([d["dim"] for d in payload],
                     np.array([d["min"] for d in payload]),
                     np.array([d["max"] for d in payload]))


def pairwise_correlation(columns: np.ndarray) -> np.ndarray:
    """Absolute Pearson correlation between feature columns: for univariate
    features this equals the canonical correlation.  Symmetric with a unit
    diagonal."""
    columns = np.asarray(columns, dtype=np.float64)
    if columns.ndim != 2 or columns.shape[0] < 30:
        raise ValueError("need at least 30 rows")
    if np.any(columns.std(axis=0) == 0):
        raise ValueError("constant column")
    corr = np.abs(np.corrcoef(columns, rowvar=False))
    np.fill_diagonal(corr, 1.0)
    return corr
