"""Corpus I/O: audio files, TIMIT-style label files, sonorant class mapping,
resampling and noise mixing.

All audio is represented as an :class:`Utterance` holding float64 samples in
[-1, 1].  Downstream analysis assumes 8 kHz; use :func:`resample_to_8k` after
loading.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import signal as sps
from scipy.io import wavfile

INT16_SCALE = 32768.0

SUPPORTED_RATES = (8000, 16000, 44100, 48000)


class CorpusError(Exception):
    """Unreadable, unsupported or empty input file."""


class SonorantClass(enum.Enum):
    """Six sonorant categories in decreasing order of sonority, plus the
    catch-all for everything else."""

    LOW_VOWEL = 0
    MID_VOWEL = 1
    HIGH_VOWEL = 2
    GLIDE = 3
    LIQUID = 4
    NASAL = 5
    NON_SONORANT = 6

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "SonorantClass":
        key = label.strip().lower().replace("-", "_").replace(" ", "_")
        for member in cls:
            if member.name.lower() == key:
                return member
        raise ValueError(f"unknown sonorant class label: {label!r}")


SONORANT_CLASSES = [c for c in SonorantClass if c is not SonorantClass.NON_SONORANT]

#: Phone inventory per sonorant category.
PHONE_CLASSES = {
    SonorantClass.NASAL: ("m", "n", "ng"),
    SonorantClass.LIQUID: ("r", "l"),
    SonorantClass.GLIDE: ("w", "y"),
    SonorantClass.HIGH_VOWEL: ("ih", "iy", "uh", "uy"),
    SonorantClass.MID_VOWEL: ("eh", "ey", "oy", "ow"),
    SonorantClass.LOW_VOWEL: ("aa", "ah", "ae"),
}

_PHONE_TO_CLASS = {
    phone: cls for cls, phones in PHONE_CLASSES.items() for phone in phones
}

#: process-wide overrides installed from a phone-map file (CLI --phone-map)
_ACTIVE_OVERRIDES: dict[str, SonorantClass] = {}


def set_class_overrides(table: dict[str, SonorantClass] | None) -> None:
    _ACTIVE_OVERRIDES.clear()
    if table:
        _ACTIVE_OVERRIDES.update(table)


def phone_to_class(phone: str, overrides: dict[str, SonorantClass] | None = None) -> SonorantClass:
    """Map a phone label to its sonorant class.  Unknown phones map to
    NON_SONORANT, making the function total."""
    key = phone.strip().lower()
    if overrides and key in overrides:
        return overrides[key]
    if key in _ACTIVE_OVERRIDES:
        return _ACTIVE_OVERRIDES[key]
    return _PHONE_TO_CLASS.get(key, SonorantClass.NON_SONORANT)


def load_class_overrides(path) -> dict[str, SonorantClass]:
    """Read a phone->class override table: one "phone class_name" pair per
    line, '#' comments allowed."""
    table = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CorpusError(f"malformed override line: {raw!r}")
        table[parts[0].lower()] = SonorantClass.from_label(parts[1])
    return table


@dataclass
class LabelSpan:
    """Half-open labeled region [start, end) in sample units."""

    start: int
    end: int
    phone: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    @property
    def sonorant_class(self) -> SonorantClass:
        return phone_to_class(self.phone)


@dataclass
class Utterance:
    """A sampled speech signal with rate and optional phone labels."""

    samples: np.ndarray
    fs: int
    labels: list[LabelSpan] | None = None
    utt_id: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or len(self.samples) == 0:
            raise ValueError("samples must be a nonempty 1-D sequence")
        if self.fs <= 0:
            raise ValueError("sampling rate must be positive")
        if self.labels:
            spans = sorted(self.labels, key=lambda s: s.start)
            for prev, cur in zip(spans, spans[1:]):
                if cur.start < prev.end:
                    raise ValueError("label spans overlap")
            if spans[-1].end > len(self.samples):
                raise ValueError("label span exceeds signal length")
            self.labels = spans

    @property
    def duration(self) -> float:
        return len(self.samples) / self.fs

    def class_at(self, index: int) -> SonorantClass | None:
        """Sonorant class of the span containing ``index``; None if the
        utterance is unlabeled or the index falls outside every span."""
        if not self.labels:
            return None
        for span in self.labels:
            if span.start <= index < span.end:
                return span.sonorant_class
        return None


def peak_normalize(u: Utterance) -> Utterance:
    """Scale so max |sample| = 1 (all-zero input returned unchanged)."""
    peak = np.max(np.abs(u.samples))
    if peak == 0:
        return u
    return replace(u, samples=u.samples / peak)


def segment_normalize(u: Utterance) -> Utterance:
    """Peak-normalize each labeled span independently; regions outside any
    span (and unlabeled utterances) are normalized by the global peak."""
    if not u.labels:
        return peak_normalize(u)
    out = u.samples.copy()
    covered = np.zeros(len(out), dtype=bool)
    for span in u.labels:
        seg = out[span.start:span.end]
        peak = np.max(np.abs(seg))
        if peak > 0:
            out[span.start:span.end] = seg / peak
        covered[span.start:span.end] = True
    rest = ~covered
    if np.any(rest):
        peak = np.max(np.abs(out[rest]))
        if peak > 0:
            out[rest] /= peak
    return replace(u, samples=out)


def _read_nist_sphere(path: Path) -> tuple[int, np.ndarray]:
    """Minimal NIST SPHERE (TIMIT native) reader: 16-bit PCM mono only."""
    with open(path, "rb") as fh:
        magic = fh.readline()
        if not magic.startswith(b"NIST_1A"):
            raise CorpusError(f"{path}: not a NIST SPHERE file")
        header_size = int(fh.readline().strip())
        fh.seek(0)
        header = fh.read(header_size).decode("ascii", errors="replace")
        fields = {}
        for line in header.splitlines()[2:]:
            parts = line.split()
            if len(parts) == 3 and parts[1].startswith("-"):
                fields[parts[0]] = parts[2]
            elif line.strip() == "end_head":
                break
        fs = int(fields.get("sample_rate", 0))
        nchan = int(fields.get("channel_count", 1))
        nbytes = int(fields.get("sample_n_bytes", 2))
        if fs <= 0 or nchan != 1 or nbytes != 2:
            raise CorpusError(f"{path}: unsupported SPHERE layout")
        fh.seek(header_size)
        raw = fh.read()
    fmt = "<" if fields.get("sample_byte_format", "01") == "01" else ">"
    data = np.frombuffer(raw, dtype=np.dtype(fmt + "i2"))
    return fs, data


def load_utterance(path, labels_path=None, utt_id: str | None = None) -> Utterance:
    """Load a 16-bit PCM mono WAV (or NIST SPHERE) file; samples are scaled
    to [-1, 1].  An optional TIMIT ``.PHN`` file attaches labels."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"{path}: no such file")
    with open(path, "rb") as fh:
        magic = fh.read(8)
    try:
        if magic.startswith(b"NIST_1A"):
            fs, data = _read_nist_sphere(path)
        else:
            fs, data = wavfile.read(path)
    except CorpusError:
        raise
    except Exception as exc:
        raise CorpusError(f"{path}: unreadable audio ({exc})") from exc
    if data.ndim != 1:
        raise CorpusError(f"{path}: expected mono audio, got {data.ndim} channels")
    if len(data) == 0:
        raise CorpusError(f"{path}: empty audio")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / INT16_SCALE
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise CorpusError(f"{path}: unsupported sample format {data.dtype}")
    labels = read_phn(labels_path) if labels_path else None
    return Utterance(samples, int(fs), labels, utt_id or path.stem)


def save_wav(path, u: Utterance) -> None:
    """Write 16-bit PCM mono WAV; samples are clipped to [-1, 1] and
    quantized with round-half-away from the int16 full scale."""
    x = np.clip(u.samples, -1.0, 1.0)
    pcm = np.clip(np.round(x * INT16_SCALE), -32768, 32767).astype(np.int16)
    wavfile.write(path, u.fs, pcm)


def save_wav_float(path, samples: np.ndarray, fs: int) -> None:
    """Write IEEE-float mono WAV without quantization (inspection dumps of
    residuals and envelopes)."""
    wavfile.write(path, fs, np.asarray(samples, dtype=np.float32))


def read_phn(path) -> list[LabelSpan]:
    """Read TIMIT .PHN label lines "start end phone" (sample units)."""
    spans = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise CorpusError(f"{path}: malformed PHN line {raw!r}")
        spans.append(LabelSpan(int(parts[0]), int(parts[1]), parts[2]))
    return spans


def write_phn(path, labels: list[LabelSpan]) -> None:
    with open(path, "w") as fh:
        for span in labels:
            fh.write(f"{span.start} {span.end} {span.phone}\n")


def _scale_labels(labels, num, den):
    if not labels:
        return labels
    return [
        LabelSpan(int(span.start * num // den), max(int(span.start * num // den) + 1,
                  int(span.end * num // den)), span.phone)
        for span in labels
    ]


def _decimation_taps(up: int, down: int, fs_in: int) -> np.ndarray:
    """Kaiser-window FIR for the polyphase resampler: passband through
    3.5 kHz, stopband at the 4 kHz output Nyquist."""
    fs_up = fs_in * up
    cutoff = 3750.0
    width = 2 * 500.0 / fs_up
    numtaps, beta = sps.kaiserord(80.0, width)
    numtaps |= 1
    # resample_poly applies the upsampling gain itself
    return sps.firwin(numtaps, cutoff, window=("kaiser", beta), fs=fs_up)


_TAPS_CACHE: dict[tuple[int, int, int], np.ndarray] = {}


def resample_to_8k(u: Utterance) -> Utterance:
    """Resample to 8 kHz, band-limiting below 4 kHz before decimation.
    Input rates outside SUPPORTED_RATES are rejected."""
    if u.fs == 8000:
        return u
    if u.fs not in SUPPORTED_RATES:
        raise CorpusError(f"unsupported input rate {u.fs}")
    ratios = {16000: (1, 2), 44100: (80, 441), 48000: (1, 6)}
    up, down = ratios[u.fs]
    key = (up, down, u.fs)
    if key not in _TAPS_CACHE:
        _TAPS_CACHE[key] = _decimation_taps(up, down, u.fs)
    out = sps.resample_poly(u.samples, up, down, window=_TAPS_CACHE[key])
    labels = _scale_labels(u.labels, up, down)
    return Utterance(out, 8000, labels, u.utt_id)


def white_noise(n: int, fs: int, seed: int = 0) -> Utterance:
    """Seeded Gaussian white-noise utterance, peak-normalized."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    return peak_normalize(Utterance(x, fs, utt_id=f"white{seed}"))


def mix_noise(u: Utterance, noise: Utterance, snr_db: float) -> Utterance:
    """Add ``noise`` scaled so the signal-to-noise power ratio over the full
    utterance equals ``snr_db``; output is re-peak-normalized.  An infinite
    ``snr_db`` returns the signal unchanged."""
    if np.isinf(snr_db) and snr_db > 0:
        return u
    if noise.fs != u.fs:
        raise ValueError(f"rate mismatch: {u.fs} vs {noise.fs}")
    n = len(u.samples)
    nz = noise.samples
    if len(nz) < n:
        reps = int(np.ceil(n / len(nz)))
        nz = np.tile(nz, reps)
    nz = nz[:n]
    p_sig = np.mean(u.samples ** 2)
    p_noise = np.mean(nz ** 2)
    if p_noise == 0:
        raise ValueError("all-zero noise with finite SNR requested")
    alpha = np.sqrt(p_sig / (p_noise * 10.0 ** (snr_db / 10.0)))
    mixed = u.samples + alpha * nz
    return peak_normalize(Utterance(mixed, u.fs, u.labels, u.utt_id))
