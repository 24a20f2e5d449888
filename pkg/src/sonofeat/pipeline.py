"""End-to-end feature extraction: epochs, HNGD features, source and
suprasegmental features, normalization, weighting and frame aggregation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import formants as fmt
from .corpus import (SONORANT_CLASSES, SonorantClass, Utterance, peak_normalize,
                     resample_to_8k, segment_normalize)
from .epochs import epochs_from_utterance, refine_epochs_to_he_peaks
from .formants import NormStats, TooFewPeaks, apply_normalizer, fit_normalizer
from .fusion import (FEATURE_NAMES, ClassStats, WeightVector, assemble_weighted,
                     fit_class_gaussians, frame_aggregate, weights_from_stats)
from .hngd import SegmentOutOfBounds, hngd_at_epoch
from .source import LpFrameConfig, hilbert_envelope, lp_residual, soe_f6
from .supra import extract_cycles, f7_per_epoch

log = logging.getLogger("sonofeat")


@dataclass
class PipelineConfig:
    """Knobs for the extraction pipeline; mirrors the CLI flags."""

    fs_policy: str = "8k"          # "8k" resamples inputs; "native" keeps fs
    nfft: int = 2048
    ztw_ms: float = 5.0
    k_cycles: int = 10
    lp_order: int = 10
    lp_frame_ms: float = 25.0
    lp_shift_ms: float = 5.0
    agg_frame_ms: float = 25.0
    agg_shift_ms: float = 10.0
    epoch_polarity: str = "rising"
    zff_trend_factor: float = 1.5
    zff_trend_passes: int = 3
    ztw_end_taper: bool = True
    f6_mode: str = "trailing"      # or "outer"
    f7_as_printed: bool = False
    seed: int = 0


@dataclass
class UtteranceFeatures:
    """Raw per-epoch features of one utterance before corpus normalization."""

    utt_id: str
    fs: int
    epoch_samples: np.ndarray          # (n,)
    raw: np.ndarray                    # (n, 7)
    valid: np.ndarray                  # (n,) bool
    classes: list                      # SonorantClass | None per epoch
    n_samples: int = 0
    n_skipped_edge: int = 0            # windows running past the signal end
    n_invalid_spectrum: int = 0        # fewer than three formant peaks


def extract_utterance(u: Utterance, cfg: PipelineConfig | None = None) -> UtteranceFeatures:
    """Run the per-utterance half of the pipeline (everything that does not
    need corpus statistics)."""
    cfg = cfg or PipelineConfig()
    if cfg.fs_policy == "8k":
        u = resample_to_8k(u)
    norm = segment_normalize(u) if u.labels else peak_normalize(u)

    train = epochs_from_utterance(norm, cfg.epoch_polarity,
                                  cfg.zff_trend_factor, cfg.zff_trend_passes)
    lp_cfg = LpFrameConfig(cfg.lp_frame_ms, cfg.lp_shift_ms, cfg.lp_order, norm.fs)
    he = hilbert_envelope(lp_residual(norm, lp_cfg), norm.fs)
    train = refine_epochs_to_he_peaks(train, he.values)
    n = len(train)
    raw = np.zeros((n, 7))
    valid = np.zeros(n, dtype=bool)
    skipped_edge = invalid_spec = 0

    if n >= 3:
        cycles = extract_cycles(norm, train)
        raw[:, 6] = f7_per_epoch(cycles, n, cfg.k_cycles, cfg.f7_as_printed)
        f7_ok = True
    else:
        f7_ok = False

    f6_vals, f6_ok = soe_f6(he, train, cfg.f6_mode)
    raw[:, 5] = np.where(np.isfinite(f6_vals), f6_vals, 0.0)

    for i, e in enumerate(train.indices):
        try:
            spec = hngd_at_epoch(norm, int(e), cfg.ztw_ms, cfg.nfft,
                                 cfg.ztw_end_taper)
        except SegmentOutOfBounds:
            skipped_edge += 1
            continue
        try:
            fset = fmt.find_peaks_valleys(spec)
            raw[i, 0] = fmt.compute_f1(fset)
            raw[i, 1] = fmt.compute_f2(fset)
            raw[i, 2] = fmt.compute_f3(fset)
            raw[i, 3] = fmt.compute_f4(fset)
            raw[i, 4], _ = fmt.compute_f5(spec, fset)
        except (TooFewPeaks, ValueError):
            invalid_spec += 1
            continue
        valid[i] = f6_ok[i] and f7_ok and np.isfinite(f6_vals[i])

    classes = [u.class_at(int(e)) for e in train.indices]
    return UtteranceFeatures(u.utt_id, norm.fs, train.indices.copy(), raw, valid,
                             classes, len(norm.samples), skipped_edge, invalid_spec)


@dataclass
class ExtractResult:
    """Corpus-level extraction output."""

    utterances: list[UtteranceFeatures]
    norm_stats: NormStats
    norm_fitted_here: bool
    weights: WeightVector | None
    class_stats: ClassStats | None
    config: PipelineConfig

    def stacked(self, require_class: bool = False):
        """Valid rows across the corpus: (utt_ids, epoch_samples, classes,
        raw, normalized)."""
        ids, samples, classes, raws = [], [], [], []
        for uf in self.utterances:
            for i in range(len(uf.epoch_samples)):
                if not uf.valid[i]:
                    continue
                if require_class and uf.classes[i] is None:
                    continue
                ids.append(uf.utt_id)
                samples.append(int(uf.epoch_samples[i]))
                classes.append(uf.classes[i])
                raws.append(uf.raw[i])
        raw = np.array(raws) if raws else np.zeros((0, 7))
        normed = apply_normalizer(raw, self.norm_stats) if len(raw) else raw
        return ids, np.array(samples, dtype=np.int64), classes, raw, normed

    def weighted_rows(self):
        ids, samples, classes, raw, normed = self.stacked()
        if self.weights is None:
            raise ValueError("no weight vector available")
        return ids, samples, classes, assemble_weighted(normed, self.weights)


def _extract_one(args):
    u, cfg = args
    try:
        return extract_utterance(u, cfg)
    except Exception as exc:  # per-file resilience, run continues
        log.warning("extraction failed for %s: %s", u.utt_id, exc)
        return None


def extract_corpus(utts, cfg: PipelineConfig | None = None,
                   norm_stats: NormStats | None = None,
                   weights: WeightVector | None = None,
                   jobs: int = 1) -> ExtractResult:
    """Extract features for a corpus of utterances.

    Corpus min-max normalization is fitted here over all valid rows unless
    ``norm_stats`` is supplied (train-time scaling applied verbatim at test
    time).  When all six sonorant classes are present, per-class Gaussians
    and KLD fusion weights are derived unless ``weights`` is supplied.
    Per-utterance failures are logged and skipped; everything failing raises.
    ``jobs`` > 1 runs a worker pool over utterances; the reduction is an
    ordered map, so results are independent of worker scheduling.
    """
    cfg = cfg or PipelineConfig()
    work = [(u, cfg) for u in utts]
    if jobs > 1:
        import multiprocessing
        with multiprocessing.Pool(jobs) as pool:
            maybe = pool.map(_extract_one, work)
    else:
        maybe = map(_extract_one, work)
    feats = [uf for uf in maybe if uf is not None]
    if not feats:
        raise RuntimeError("extraction failed for every utterance")

    blocks = [uf.raw[uf.valid] for uf in feats if uf.valid.any()]
    if not blocks:
        raise RuntimeError("no valid feature rows in the corpus")
    all_raw = np.vstack(blocks)
    if len(all_raw) < 2:
        raise RuntimeError("too few valid feature rows to fit statistics")
    fitted_here = norm_stats is None
    if norm_stats is None:
        norm_stats = fit_normalizer(all_raw, FEATURE_NAMES)

    result = ExtractResult(feats, norm_stats, fitted_here, weights, None, cfg)
    if weights is None:
        _, _, classes, _, normed = result.stacked(require_class=True)
        present = {c for c in classes}
        if all(c in present for c in SONORANT_CLASSES):
            mask = [c in SONORANT_CLASSES for c in classes]
            rows = normed[np.array(mask)]
            labels = [c for c in classes if c in SONORANT_CLASSES]
            stats = fit_class_gaussians(rows, labels, SONORANT_CLASSES, FEATURE_NAMES)
            result.class_stats = stats
            result.weights = weights_from_stats(stats)
    return result


def _fmtf(x: float) -> str:
    return f"{x:.9g}"


def write_epoch_csv(path, result: ExtractResult) -> None:
    """Valid per-epoch rows: raw and normalized feature columns."""
    ids, samples, classes, raw, normed = result.stacked()
    with open(path, "w") as fh:
        head_raw = ",".join(f"{n}_raw" for n in FEATURE_NAMES)
        head_nrm = ",".join(FEATURE_NAMES)
        fh.write(f"utt_id,epoch_sample,class,{head_raw},{head_nrm}\n")
        for i in range(len(ids)):
            cls = classes[i].label if classes[i] is not None else ""
            raw_s = ",".join(_fmtf(v) for v in raw[i])
            nrm_s = ",".join(_fmtf(v) for v in normed[i])
            fh.write(f"{ids[i]},{samples[i]},{cls},{raw_s},{nrm_s}\n")


def write_frame_csv(path, result: ExtractResult) -> None:
    """Frame-aggregated normalized features, one block per utterance; frames
    without epochs carry NaN features and n_epochs=0."""
    cfg = result.config
    with open(path, "w") as fh:
        head = ",".join(FEATURE_NAMES)
        fh.write(f"utt_id,frame_index,start_sample,n_epochs,{head}\n")
        for uf in result.utterances:
            if not uf.valid.any():
                continue
            normed = apply_normalizer(uf.raw[uf.valid], result.norm_stats)
            starts, rows, counts = frame_aggregate(
                uf.epoch_samples[uf.valid], normed, uf.fs,
                cfg.agg_frame_ms, cfg.agg_shift_ms, uf.n_samples)
            for fi in range(len(starts)):
                vals = ",".join(_fmtf(v) if np.isfinite(v) else "nan"
                                for v in rows[fi])
                fh.write(f"{uf.utt_id},{fi},{starts[fi]},{counts[fi]},{vals}\n")


def read_epoch_csv(path):
    """Inverse of :func:`write_epoch_csv`; returns (utt_ids, epoch_samples,
    classes, raw, normalized)."""
    ids, samples, classes, raw, normed = [], [], [], [], []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        n_feat = (len(header) - 3) // 2
        for line in fh:
            parts = line.rstrip("\n").split(",")
            ids.append(parts[0])
            samples.append(int(parts[1]))
            classes.append(SonorantClass.from_label(parts[2]) if parts[2] else None)
            raw.append([float(v) for v in parts[3:3 + n_feat]])
            normed.append([float(v) for v in parts[3 + n_feat:3 + 2 * n_feat]])
    return (ids, np.array(samples, dtype=np.int64), classes,
            np.array(raw), np.array(normed))
