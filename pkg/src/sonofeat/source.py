"""Excitation-source analysis: LP residual, its Hilbert envelope, and the
per-epoch peak-to-sidelobe ratio.

The residual from frame-wise inverse filtering approximates the glottal
excitation; its Hilbert envelope turns the polarity-ambiguous spikes at
glottal closures into positive peaks whose sidelobe pattern separates broad
sonorant classes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .corpus import Utterance
from .epochs import EpochTrain


class SingularFrame(Exception):
    """Constant (silent or DC) frame: no spectral content to model."""


@dataclass
class LpFrameConfig:
    frame_ms: float = 25.0
    shift_ms: float = 5.0
    order: int = 10
    fs: int = 8000

    @property
    def frame_len(self) -> int:
        return int(round(self.frame_ms * self.fs / 1000.0))

    @property
    def shift_len(self) -> int:
        return int(round(self.shift_ms * self.fs / 1000.0))

    def __post_init__(self):
        if self.order >= self.frame_len:
            raise ValueError("LP order must be below the frame length")
        if self.shift_len > self.frame_len:
            raise ValueError("shift must not exceed the frame length")


def _levinson(r: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Levinson-Durbin recursion on autocorrelation lags r[0..order];
    returns (predictor coefficients a[1..p], reflection coefficients)."""
    a = np.zeros(order)
    refl = np.zeros(order)
    err = r[0]
    for i in range(1, order + 1):
        acc = r[i] - (np.dot(a[: i - 1], r[i - 1:0:-1]) if i > 1 else 0.0)
        if err <= 0 or not np.isfinite(err):
            raise SingularFrame("prediction error collapsed to zero")
        k = acc / err
        refl[i - 1] = k
        new_a = a.copy()
        new_a[i - 1] = k
        if i > 1:
            new_a[: i - 1] = a[: i - 1] - k * a[i - 2::-1]
        a = new_a
        err *= 1.0 - k * k
    return a, refl


def lp_coefficients(frame: np.ndarray, order: int) -> np.ndarray:
    """Autocorrelation-method predictor coefficients of a Hamming-tapered
    frame.  Returns a[1..order] such that s_hat[n] = sum a_k s[n-k]; the
    inverse filter is A(z) = 1 - sum a_k z^-k."""
    frame = np.asarray(frame, dtype=np.float64)
    if order < 0:
        raise ValueError("negative order")
    if order == 0:
        return np.zeros(0)
    if len(frame) <= order:
        raise ValueError("frame shorter than the LP order")
    if np.ptp(frame) == 0:
        raise SingularFrame("constant frame")
    w = frame * np.hamming(len(frame))
    r = np.correlate(w, w, mode="full")[len(frame) - 1:len(frame) + order]
    if r[0] <= 0:
        raise SingularFrame("zero-energy frame")
    a, _ = _levinson(r, order)
    return a


def inverse_filter(x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Residual e[n] = x[n] - sum a_k x[n-k]."""
    return sps.lfilter(np.concatenate(([1.0], -a)), [1.0], x)


def lp_residual(u: Utterance, cfg: LpFrameConfig | None = None) -> np.ndarray:
    """Frame-wise inverse filtering of the whole utterance.  Each frame's
    residual is computed with `order` samples of signal context so frame
    starts carry no transient; consecutive frames hand off with a linear
    crossfade over the shift region.  Constant frames pass through
    unfiltered.  Output length equals input length."""
    cfg = cfg or LpFrameConfig(fs=u.fs)
    if cfg.fs != u.fs:
        raise ValueError(f"config fs {cfg.fs} != utterance fs {u.fs}")
    x = u.samples
    n = len(x)
    flen, shift = cfg.frame_len, cfg.shift_len
    if n < flen:
        # too short for framing: single whole-signal frame
        flen = n
    starts = list(range(0, n - flen + 1, shift))
    if starts[-1] + flen < n:
        starts.append(n - flen)
    res = np.zeros(n)
    for t in starts:
        frame = x[t:t + flen]
        try:
            a = lp_coefficients(frame, cfg.order if flen > cfg.order else 0)
        except SingularFrame:
            r = frame.copy()
        else:
            ctx_lo = max(0, t - cfg.order)
            r = inverse_filter(x[ctx_lo:t + flen], a)[t - ctx_lo:]
        if t == 0:
            res[t:t + flen] = r
        else:
            fade = min(shift, flen, t)
            ramp = np.arange(fade) / fade
            res[t:t + fade] = (1.0 - ramp) * res[t:t + fade] + ramp * r[:fade]
            res[t + fade:t + flen] = r[fade:]
    return res


@dataclass
class HilbertEnvelope:
    values: np.ndarray
    fs: int

    def __len__(self):
        return len(self.values)


def hilbert_envelope(e: np.ndarray, fs: int = 8000) -> HilbertEnvelope:
    """sqrt(e^2 + e_h^2) where e_h is the DFT-domain Hilbert transform
    (positive-frequency half rotated by -j, negative half by +j), computed
    at the next power-of-two DFT length."""
    e = np.asarray(e, dtype=np.float64)
    n = len(e)
    if n < 2:
        raise ValueError("need at least 2 samples")
    nfft = 1 << int(np.ceil(np.log2(n)))
    spec = np.fft.fft(e, nfft)
    rot = np.empty(nfft, dtype=complex)
    rot[: nfft // 2] = -1j * spec[: nfft // 2]
    rot[nfft // 2:] = 1j * spec[nfft // 2:]
    eh = np.fft.ifft(rot).real[:n]
    return HilbertEnvelope(np.sqrt(e * e + eh * eh), fs)


def soe_f6(he: HilbertEnvelope, epochs: EpochTrain,
           mode: str = "trailing") -> tuple[np.ndarray, np.ndarray]:
    """Peak-to-sidelobe ratio of the Hilbert envelope around each epoch.

    A 3 ms segment (1.5 ms each side of the epoch) is normalized by its own
    maximum; P is the central value and mu the mean over the trailing
    +0.5..+1.5 ms third (``mode='outer'`` averages both outer thirds
    instead).  Returns (f6 values, validity mask); epochs whose segment runs
    out of bounds are invalid.
    """
    if mode not in ("trailing", "outer"):
        raise ValueError(f"unknown f6 mode {mode!r}")
    fs = he.fs
    half = int(round(0.0015 * fs))
    third = int(round(0.0005 * fs))
    vals = np.zeros(len(epochs))
    ok = np.zeros(len(epochs), dtype=bool)
    v = he.values
    for i, e in enumerate(epochs.indices):
        if e - half < 0 or e + half + 1 > len(v):
            continue
        seg = v[e - half:e + half + 1]
        peak = np.max(seg)
        if peak <= 0:
            continue
        seg = seg / peak
        center = seg[half]
        tail = seg[half + third:]
        if mode == "outer":
            tail = np.concatenate((seg[: half - third + 1], tail))
        mu = float(np.mean(tail))
        if mu <= 0:
            vals[i] = np.inf
            ok[i] = False
            continue
        vals[i] = center / mu
        ok[i] = True
    return vals, ok
