"""Zero-time windowing and the HNGD spectrum.

At each epoch a heavily tapering window (the zero-frequency resonator
response transplanted to the time domain) weights the samples just after
glottal closure.  The numerator of the group-delay function of that segment
is double-differenced and its analytic envelope taken, giving a spectrum
whose formant peaks survive the very short (5 ms) analysis span.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Utterance

DEFAULT_NFFT = 2048
DEFAULT_WINDOW_MS = 5.0


class SegmentOutOfBounds(Exception):
    """The analysis window would run past the end of the signal."""


@dataclass
class ZtwWindow:
    """Zero-time window weights: w[0] = 0, w[n] = 1/(4 sin^2(pi n / 2N))."""

    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.weights)


def make_ztw_window(n_samples: int) -> ZtwWindow:
    if n_samples < 4:
        raise ValueError("window length must be at least 4 samples")
    w = np.zeros(n_samples)
    n = np.arange(1, n_samples)
    w[1:] = 1.0 / (4.0 * np.sin(np.pi * n / (2.0 * n_samples)) ** 2)
    return ZtwWindow(w)


def end_taper(n_samples: int) -> np.ndarray:
    """Raised-cosine taper 4 cos^2(pi n / 2N) applied on top of the ZTW
    weights.  The ZTW window still leaves an abrupt segment-end truncation
    whose ripple (period fs/N) shows up as spurious spectral peaks; the taper
    removes it."""
    n = np.arange(n_samples)
    return 4.0 * np.cos(np.pi * n / (2.0 * n_samples)) ** 2


def window_segment(u: Utterance, epoch: int, n_samples: int) -> np.ndarray:
    """Elementwise product of samples[epoch : epoch+N] with the ZTW weights."""
    if epoch < 0 or epoch + n_samples > len(u.samples):
        raise SegmentOutOfBounds(
            f"epoch {epoch} + {n_samples} exceeds signal length {len(u.samples)}")
    return u.samples[epoch:epoch + n_samples] * make_ztw_window(n_samples).weights


def ngd_spectrum(x: np.ndarray, nfft: int) -> np.ndarray:
    """Numerator of the group-delay function over ``nfft`` DFT bins:
    g = Re{X conj(Y)} with X = DFT(x) and Y = DFT(n x[n])."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) > nfft:
        raise ValueError("segment longer than the DFT size")
    ramp = np.arange(len(x))
    spec_x = np.fft.fft(x, nfft)
    spec_y = np.fft.fft(ramp * x, nfft)
    return (spec_x * np.conj(spec_y)).real


def dngd(g: np.ndarray) -> np.ndarray:
    """Negated second difference of the NGD; endpoints replicated.  The
    negation keeps spectral peaks as maxima."""
    g = np.asarray(g, dtype=np.float64)
    if len(g) < 3:
        raise ValueError("need at least 3 bins")
    d = np.empty_like(g)
    d[1:-1] = -(g[2:] - 2.0 * g[1:-1] + g[:-2])
    d[0] = d[1]
    d[-1] = d[-2]
    return d


def envelope_of_sequence(d: np.ndarray) -> np.ndarray:
    """Analytic-signal magnitude sqrt(d^2 + H{d}^2), where the Hilbert
    transform multiplies the positive-frequency half of the DFT by -j and the
    negative-frequency half by +j."""
    d = np.asarray(d, dtype=np.float64)
    n = len(d)
    if n < 2:
        raise ValueError("need at least 2 samples")
    spec = np.fft.fft(d)
    rot = np.empty(n, dtype=complex)
    rot[: n // 2] = -1j * spec[: n // 2]
    rot[n // 2:] = 1j * spec[n // 2:]
    h = np.fft.ifft(rot).real
    return np.sqrt(d * d + h * h)


@dataclass
class HngdSpectrum:
    """Magnitude envelope over DFT bins 0 .. nfft/2 for one epoch."""

    magnitudes: np.ndarray
    fs: int
    nfft: int
    epoch_index: int

    @property
    def bin_hz(self) -> float:
        return self.fs / self.nfft

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(len(self.magnitudes)) * self.bin_hz


def hngd_at_epoch(u: Utterance, epoch: int, window_ms: float = DEFAULT_WINDOW_MS,
                  nfft: int = DEFAULT_NFFT, taper: bool = True) -> HngdSpectrum:
    """HNGD spectrum of the ``window_ms`` segment starting at ``epoch``."""
    n_samples = int(round(window_ms * u.fs / 1000.0))
    seg = window_segment(u, epoch, n_samples)
    if taper:
        seg = seg * end_taper(n_samples)
    g = ngd_spectrum(seg, nfft)
    env = envelope_of_sequence(dngd(g))
    return HngdSpectrum(env[: nfft // 2 + 1], u.fs, nfft, epoch)


def write_spectrum_csv(path, spectra: list[HngdSpectrum]) -> None:
    """Rows of (epoch_sample, bin_hz, magnitude)."""
    with open(path, "w") as fh:
        fh.write("epoch_sample,bin_hz,magnitude\n")
        for spec in spectra:
            for hz, mag in zip(spec.freqs, spec.magnitudes):
                fh.write(f"{spec.epoch_index},{hz:.6g},{mag:.9g}\n")


def write_spectrum_npz(path, spectra: list[HngdSpectrum]) -> None:
    """Columnar binary dump for bulk runs."""
    epoch_col = np.concatenate([
        np.full(len(s.magnitudes), s.epoch_index, dtype=np.int64) for s in spectra])
    hz_col = np.concatenate([s.freqs for s in spectra])
    mag_col = np.concatenate([s.magnitudes for s in spectra])
    np.savez_compressed(path, epoch_sample=epoch_col, bin_hz=hz_col,
                        magnitude=mag_col)
