"""Per-class Gaussian statistics, symmetric KLD feature weighting, and
assembly of the weighted seven-dimensional sonority vector at epoch and
frame level.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

SIGMA_FLOOR = 1e-9

FEATURE_NAMES = ["f1", "f2", "f3", "f4", "f5", "f6", "f7"]


class DegenerateStats(Exception):
    """Absent class or zero-variance dimension in the Gaussian fits."""


@dataclass
class ClassStats:
    """Sample mean/std (n-1 denominator) per (class, feature dimension)."""

    classes: list
    names: list[str]
    mean: np.ndarray  # (n_classes, n_dims)
    std: np.ndarray
    count: np.ndarray  # (n_classes,)

    def row(self, cls) -> int:
        return self.classes.index(cls)


def fit_class_gaussians(rows: np.ndarray, labels, classes=None,
                        names=None) -> ClassStats:
    """Fit per-class univariate Gaussians for each feature column.  Raises
    :class:`DegenerateStats` when a requested class is absent, has fewer than
    two rows, or shows (near-)zero variance in any dimension."""
    rows = np.asarray(rows, dtype=np.float64)
    labels = list(labels)
    if classes is None:
        classes = sorted(set(labels), key=lambda c: getattr(c, "value", c))
    if names is None:
        names = FEATURE_NAMES[: rows.shape[1]]
    mean = np.empty((len(classes), rows.shape[1]))
    std = np.empty_like(mean)
    count = np.empty(len(classes), dtype=np.int64)
    for ci, cls in enumerate(classes):
        mask = np.array([lab == cls for lab in labels])
        sub = rows[mask]
        if len(sub) < 2:
            raise DegenerateStats(f"class {cls} has {len(sub)} rows")
        mean[ci] = sub.mean(axis=0)
        std[ci] = sub.std(axis=0, ddof=1)
        count[ci] = len(sub)
        if np.any(std[ci] < SIGMA_FLOOR):
            bad = [names[d] for d in np.nonzero(std[ci] < SIGMA_FLOOR)[0]]
            raise DegenerateStats(f"zero-variance dimension(s) {bad} in class {cls}")
    return ClassStats(list(classes), list(names), mean, std, count)


def kld_symmetric(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Symmetric KLD between two univariate Gaussians (mu, sigma):
    0.5 (sa^2/sb^2 + sb^2/sa^2) - 1 + 0.5 (mu_a - mu_b)^2 (1/sa^2 + 1/sb^2)."""
    mu_a, sig_a = a
    mu_b, sig_b = b
    if sig_a < SIGMA_FLOOR or sig_b < SIGMA_FLOOR:
        raise DegenerateStats("standard deviation below the 1e-9 floor")
    va, vb = sig_a * sig_a, sig_b * sig_b
    dmu = mu_a - mu_b
    return 0.5 * (va / vb + vb / va) - 1.0 + 0.5 * dmu * dmu * (1.0 / va + 1.0 / vb)


def average_kld(stats: ClassStats, dim: int) -> float:
    """Mean symmetric KLD over the 15 unordered class pairs for one
    feature dimension."""
    n = len(stats.classes)
    pairs = list(itertools.combinations(range(n), 2))
    total = 0.0
    for i, j in pairs:
        total += kld_symmetric((stats.mean[i, dim], stats.std[i, dim]),
                               (stats.mean[j, dim], stats.std[j, dim]))
    return total / len(pairs)


def average_kld_from_values(samples: dict) -> float:
    """Average pairwise KLD of one scalar feature given raw per-class value
    arrays (convenience for the K sweep)."""
    classes = sorted(samples, key=lambda c: getattr(c, "value", c))
    stats = []
    for cls in classes:
        vals = np.asarray(samples[cls], dtype=np.float64)
        if len(vals) < 2:
            raise DegenerateStats(f"class {cls} has fewer than 2 samples")
        stats.append((vals.mean(), vals.std(ddof=1)))
    pairs = list(itertools.combinations(range(len(classes)), 2))
    return sum(kld_symmetric(stats[i], stats[j]) for i, j in pairs) / len(pairs)


@dataclass
class WeightVector:
    """Positive fusion weights over the seven dimensions, summing to 1."""

    weights: np.ndarray
    avg_klds: np.ndarray | None = None
    names: list[str] = field(default_factory=lambda: list(FEATURE_NAMES))

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if np.any(self.weights <= 0):
            raise ValueError("weights must all be positive")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")


def compute_weights(avg_klds) -> WeightVector:
    """w_i = avg_kld_i / sum(avg_kld)."""
    avg_klds = np.asarray(avg_klds, dtype=np.float64)
    if np.any(avg_klds <= 0):
        raise ValueError("average KLDs must all be positive")
    w = avg_klds / avg_klds.sum()
    return WeightVector(w, avg_klds, list(FEATURE_NAMES[: len(w)]))


def weights_from_stats(stats: ClassStats) -> WeightVector:
    klds = np.array([average_kld(stats, d) for d in range(len(stats.names))])
    vec = compute_weights(klds)
    vec.names = list(stats.names)
    return vec


def assemble_weighted(rows: np.ndarray, w: WeightVector) -> np.ndarray:
    """Elementwise weighted copy w_i * f_i (original rows untouched)."""
    rows = np.asarray(rows, dtype=np.float64)
    return rows * w.weights


def write_class_stats_csv(path, stats: ClassStats) -> None:
    """Per-(class, dimension) Gaussian parameters as plain columns, directly
    plottable with gnuplot alongside the rendered figures."""
    with open(path, "w") as fh:
        fh.write("class,dim,mean,std,count\n")
        for ci, cls in enumerate(stats.classes):
            label = cls.label if hasattr(cls, "label") else str(cls)
            for di, name in enumerate(stats.names):
                fh.write(f"{label},{name},{stats.mean[ci, di]:.9g},"
                         f"{stats.std[ci, di]:.9g},{int(stats.count[ci])}\n")


def save_weights(path, w: WeightVector) -> None:
    payload = []
    for i, name in enumerate(w.names):
        entry = {"dim_name": name, "weight": float(w.weights[i])}
        if w.avg_klds is not None:
            entry["avg_kld"] = float(w.avg_klds[i])
        payload.append(entry)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_weights(path) -> WeightVector:
    with open(path) as fh:
        payload = json.load(fh)
    weights = np.array([d["weight"] for d in payload])
    klds = (np.array([d["avg_kld"] for d in payload])
            if all("avg_kld" in d for d in payload) else None)
    return WeightVector(weights, klds, [d["dim_name"] for d in payload])


def frame_aggregate(epoch_samples: np.ndarray, rows: np.ndarray, fs: int,
                    frame_ms: float = 25.0, shift_ms: float = 10.0,
                    n_samples: int | None = None):
    """Average per-epoch feature rows within overlapping analysis frames.

    Returns (frame_starts, frame_rows, n_epochs_per_frame); frames with no
    epochs yield NaN rows and a zero count (non-sonorant candidates).
    """
    epoch_samples = np.asarray(epoch_samples, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.float64)
    if len(epoch_samples) != len(rows):
        raise ValueError("epoch/row count mismatch")
    order = np.argsort(epoch_samples, kind="stable")
    epoch_samples = epoch_samples[order]
    rows = rows[order]
    flen = int(round(frame_ms * fs / 1000.0))
    shift = int(round(shift_ms * fs / 1000.0))
    end = n_samples if n_samples is not None else (
        int(epoch_samples[-1]) + 1 if len(epoch_samples) else flen)
    starts = np.arange(0, max(end - flen, 0) + 1, shift, dtype=np.int64)
    if len(starts) == 0:
        starts = np.array([0], dtype=np.int64)
    out = np.full((len(starts), rows.shape[1] if rows.ndim == 2 else 0), np.nan)
    counts = np.zeros(len(starts), dtype=np.int64)
    for fi, t in enumerate(starts):
        mask = (epoch_samples >= t) & (epoch_samples < t + flen)
        counts[fi] = int(mask.sum())
        if counts[fi]:
            out[fi] = rows[mask].mean(axis=0)
    return starts, out, counts
