"""Suprasegmental periodicity feature: mean normalized cross-correlation of
each pitch cycle with its next K cycles, plus the K-selection sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Utterance
from .epochs import EpochTrain

DEFAULT_K = 10
K_SWEEP_RANGE = range(4, 20)


@dataclass
class PitchCycleSet:
    """Consecutive epoch-to-epoch signal segments (M-1 cycles for M epochs)."""

    cycles: list[np.ndarray]
    fs: int

    def __len__(self):
        return len(self.cycles)


def extract_cycles(u: Utterance, epochs: EpochTrain) -> PitchCycleSet:
    if len(epochs) < 2:
        raise ValueError("need at least two epochs to form a cycle")
    idx = epochs.indices
    cycles = [u.samples[idx[i]:idx[i + 1]] for i in range(len(idx) - 1)]
    return PitchCycleSet(cycles, u.fs)


def _ncc(a: np.ndarray, b: np.ndarray, as_printed: bool) -> float:
    """Normalized cross-correlation of two right-zero-padded cycles.  The
    padding leaves both the inner product and the energies unchanged, so only
    the common prefix enters the dot product."""
    ea = float(np.dot(a, a))
    eb = float(np.dot(b, b))
    if ea == 0.0 or eb == 0.0:
        return 0.0
    m = min(len(a), len(b))
    ip = float(np.dot(a[:m], b[:m]))
    if as_printed:
        return ip / (ea * eb)
    return ip / np.sqrt(ea * eb)


def f7_correlation(cycles: PitchCycleSet, k: int,
                   as_printed_denominator: bool = False) -> np.ndarray:
    """Per-cycle similarity over the next ``k`` cycles.

    f7(i) = (1/K) sum_{j=i+1}^{i+K} NCC(x_i, x_j).  When fewer than k+2
    cycles are available, k is reduced to (number of cycles - 2), floored at
    1.  The tail cycles (which lack k successors) repeat the last computed
    value.  ``as_printed_denominator`` switches the NCC denominator from
    sqrt(E_i E_j) to the unnormalized product E_i E_j for comparison.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    m1 = len(cycles)  # number of cycles = M - 1
    if m1 < 2:
        raise ValueError("need at least two cycles")
    k_eff = min(k, m1 - 2) if m1 - 2 >= 1 else 1
    k_eff = max(1, min(k_eff, m1 - 1))
    out = np.empty(m1)
    n_valid = m1 - k_eff
    for i in range(n_valid):
        acc = 0.0
        for j in range(i + 1, i + k_eff + 1):
            acc += _ncc(cycles.cycles[i], cycles.cycles[j], as_printed_denominator)
        out[i] = acc / k_eff
    out[n_valid:] = out[n_valid - 1]
    return out


def f7_per_epoch(cycles: PitchCycleSet, n_epochs: int, k: int,
                 as_printed_denominator: bool = False) -> np.ndarray:
    """Align the per-cycle feature to epochs: epoch i takes the value of
    cycle i; the final epoch reuses the last cycle's value."""
    per_cycle = f7_correlation(cycles, k, as_printed_denominator)
    idx = np.minimum(np.arange(n_epochs), len(per_cycle) - 1)
    return per_cycle[idx]


def sweep_k(values_by_class: dict, k_range=K_SWEEP_RANGE) -> tuple[list[tuple[int, float]], int]:
    """Average symmetric KLD across the per-class Gaussian fits of the
    suprasegmental feature, for each candidate K; returns the per-K curve
    and the argmax K.  ``values_by_class`` maps a class to its list of
    (cycles, n_epochs) items.
    """
    from .fusion import average_kld_from_values

    if len(values_by_class) < 2:
        raise ValueError("need at least two classes")
    curve = []
    for k in k_range:
        samples = {}
        for cls, items in values_by_class.items():
            vals = [f7_per_epoch(cycles, n_epochs, k)
                    for cycles, n_epochs in items]
            samples[cls] = np.concatenate(vals)
            if len(samples[cls]) < 2:
                raise ValueError(f"class {cls} has fewer than 2 samples")
        curve.append((int(k), average_kld_from_values(samples)))
    best_k = max(curve, key=lambda kv: kv[1])[0]
    return curve, best_k


def write_sweep_csv(path, curve: list[tuple[int, float]]) -> None:
    with open(path, "w") as fh:
        fh.write("k,avg_kld\n")
        for k, v in curve:
            fh.write(f"{k},{v:.9g}\n")
