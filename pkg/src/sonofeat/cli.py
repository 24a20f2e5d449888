"""Command-line interface.

Subcommands cover the full pipeline: synthetic signal generation, epoch
extraction, single-spectrum inspection, corpus feature extraction, weight
derivation, the suprasegmental K sweep, classification, sonorant detection
and feature correlation.  Report-style subcommands render figures next to
their CSV/JSON outputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields as dc_fields
from pathlib import Path

import numpy as np

from . import plots
from .corpus import (SonorantClass, Utterance, load_utterance, mix_noise,
                     read_phn, save_wav, white_noise)
from .epochs import (epochs_from_utterance, refine_epochs_to_he_peaks,
                     write_epochs_ascii, write_epochs_json)
from .evaluate import (aggregate_frames_for_detection, fit_sonorant_detector,
                       gaussian_classify, sonorant_detect,
                       write_posteriors_csv)
from .formants import load_norm_stats, pairwise_correlation, save_norm_stats
from .fusion import (FEATURE_NAMES, assemble_weighted, fit_class_gaussians,
                     load_weights, save_weights, weights_from_stats,
                     write_class_stats_csv)
from .hngd import hngd_at_epoch, write_spectrum_csv, write_spectrum_npz
from .pipeline import (PipelineConfig, extract_corpus, read_epoch_csv,
                       write_epoch_csv, write_frame_csv)
from .source import LpFrameConfig, hilbert_envelope, lp_residual
from .supra import extract_cycles, sweep_k, write_sweep_csv
from .synth import SynthSpec, continuum_corpus, synth, vowel_corpus

log = logging.getLogger("sonofeat")

#: class -> representative phone used when labeling synthetic corpora
CLASS_PHONE = {
    SonorantClass.LOW_VOWEL: "aa",
    SonorantClass.MID_VOWEL: "eh",
    SonorantClass.HIGH_VOWEL: "ih",
    SonorantClass.GLIDE: "w",
    SonorantClass.LIQUID: "r",
    SonorantClass.NASAL: "m",
    SonorantClass.NON_SONORANT: "sil",
}


def read_config_file(path) -> dict:
    """Plain key=value configuration lines; '#' starts a comment."""
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"config: expected key=value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def build_pipeline_config(args) -> PipelineConfig:
    """Defaults, overridden by the config file, overridden by CLI flags."""
    cfg = PipelineConfig()
    file_vals = read_config_file(args.config) if args.config else {}
    for key, val in file_vals.items():
        if not hasattr(cfg, key):
            raise SystemExit(f"config: unknown key {key!r}")
        cur = getattr(cfg, key)
        if isinstance(cur, bool):
            setattr(cfg, key, val.lower() in ("1", "true", "yes", "on"))
        elif isinstance(cur, int):
            setattr(cfg, key, int(val))
        elif isinstance(cur, float):
            setattr(cfg, key, float(val))
        else:
            setattr(cfg, key, val)
    flag_map = {
        "fs_policy": "fs_policy", "nfft": "nfft", "ztw_ms": "ztw_ms",
        "k": "k_cycles", "seed": "seed", "polarity": "epoch_polarity",
    }
    for flag, attr in flag_map.items():
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, attr, val)
    return cfg


def add_global_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file (flags override it)")
    p.add_argument("--fs-policy", dest="fs_policy", choices=["8k", "native"])
    p.add_argument("--nfft", type=int)
    p.add_argument("--ztw-ms", dest="ztw_ms", type=float)
    p.add_argument("--k", type=int, help="suprasegmental cycle count")
    p.add_argument("--seed", type=int)
    p.add_argument("--snr", type=float,
                   help="mix noise at this SNR (dB) before extraction")
    p.add_argument("--noise-wav", dest="noise_wav",
                   help="noise recording; omit for seeded white noise")
    p.add_argument("--norm-stats", dest="norm_stats",
                   help="normalization sidecar JSON (loaded if it exists)")
    p.add_argument("--phone-map", dest="phone_map",
                   help="phone->class override file (one 'phone class' per line)")
    p.add_argument("--weights-json", dest="weights_json",
                   help="fusion weight JSON (loaded if it exists)")
    p.add_argument("--polarity", choices=["rising", "falling"])
    p.add_argument("-v", "--verbose", action="store_true")


def _parse_formants(text: str):
    out = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) not in (2, 3):
            raise SystemExit(f"bad formant spec {part!r}; use freq:bw[:gain]")
        gain = float(bits[2]) if len(bits) == 3 else 1.0
        out.append((float(bits[0]), float(bits[1]), gain))
    return out


def _gather_wavs(inputs) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.wav")))
        else:
            paths.append(p)
    return paths


def _phn_for(wav: Path, phn_dir) -> Path | None:
    candidates = [wav.with_suffix(".phn"), wav.with_suffix(".PHN")]
    if phn_dir:
        candidates = [Path(phn_dir) / f"{wav.stem}.phn",
                      Path(phn_dir) / f"{wav.stem}.PHN"] + candidates
    for c in candidates:
        if c.is_file():
            return c
    return None


def _load_corpus(args) -> list[Utterance]:
    wavs = _gather_wavs(args.inputs)
    if not wavs:
        raise SystemExit("no input wav files")
    utts = []
    noise = None
    for wav in wavs:
        try:
            utt = load_utterance(wav, _phn_for(wav, getattr(args, "phn_dir", None)))
        except Exception as exc:
            log.warning("skipping %s: %s", wav, exc)
            continue
        if args.snr is not None:
            if args.noise_wav:
                if noise is None:
                    noise = load_utterance(args.noise_wav)
                nz = noise
                if nz.fs != utt.fs:
                    raise SystemExit("noise/signal rate mismatch")
            else:
                nz = white_noise(len(utt.samples), utt.fs, args.seed or 0)
            utt = mix_noise(utt, nz, args.snr)
        utts.append(utt)
    if not utts:
        raise SystemExit("all input files failed to load")
    return utts


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    seed = args.seed or 0
    if args.corpus == "continuum":
        items = continuum_corpus(args.per_class, seed, args.duration)
        for utt, gt, cls in items:
            save_wav(outdir / f"{utt.utt_id}.wav", utt)
            with open(outdir / f"{utt.utt_id}.phn", "w") as fh:
                fh.write(f"0 {len(utt.samples)} {CLASS_PHONE[cls]}\n")
            np.savetxt(outdir / f"{utt.utt_id}.gci", gt, fmt="%d")
        n_samples = int(args.duration * 8000)
        for i in range(args.nonsonorant):
            noise = white_noise(n_samples, 8000, seed=seed * 1000 + 500 + i)
            noise.utt_id = f"nonson_{i:02d}"
            save_wav(outdir / f"{noise.utt_id}.wav", noise)
            with open(outdir / f"{noise.utt_id}.phn", "w") as fh:
                fh.write(f"0 {n_samples} {CLASS_PHONE[SonorantClass.NON_SONORANT]}\n")
        print(f"wrote {len(items)} continuum + {args.nonsonorant} "
              f"non-sonorant utterances to {outdir}")
    elif args.corpus == "vowels":
        items = vowel_corpus(args.count, seed, args.duration)
        for utt, gt, _spec in items:
            save_wav(outdir / f"{utt.utt_id}.wav", utt)
            np.savetxt(outdir / f"{utt.utt_id}.gci", gt, fmt="%d")
        print(f"wrote {len(items)} vowel utterances to {outdir}")
    else:
        spec = SynthSpec(args.pitch, _parse_formants(args.formants),
                         args.duration, jitter=args.jitter,
                         noise_floor=args.noise_floor)
        utt, gt = synth(spec, seed)
        name = args.name or "synth"
        save_wav(outdir / f"{name}.wav", utt)
        np.savetxt(outdir / f"{name}.gci", gt, fmt="%d")
        print(f"wrote {outdir / (name + '.wav')} ({len(gt)} ground-truth epochs)")
    return 0


def _epochs_for(utt: Utterance, cfg: PipelineConfig, refine: bool = True):
    train = epochs_from_utterance(utt, cfg.epoch_polarity, cfg.zff_trend_factor,
                                  cfg.zff_trend_passes)
    if refine:
        lp_cfg = LpFrameConfig(cfg.lp_frame_ms, cfg.lp_shift_ms, cfg.lp_order,
                               utt.fs)
        he = hilbert_envelope(lp_residual(utt, lp_cfg), utt.fs)
        train = refine_epochs_to_he_peaks(train, he.values)
    return train


def cmd_epochs(args) -> int:
    cfg = build_pipeline_config(args)
    utt = load_utterance(args.wav)
    if cfg.fs_policy == "8k":
        from .corpus import resample_to_8k
        utt = resample_to_8k(utt)
    train = _epochs_for(utt, cfg, refine=not args.raw)
    if args.dump_source:
        from .corpus import save_wav_float
        lp_cfg = LpFrameConfig(cfg.lp_frame_ms, cfg.lp_shift_ms, cfg.lp_order,
                               utt.fs)
        residual = lp_residual(utt, lp_cfg)
        envelope = hilbert_envelope(residual, utt.fs)
        save_wav_float(f"{args.dump_source}_residual.wav", residual, utt.fs)
        save_wav_float(f"{args.dump_source}_envelope.wav", envelope.values,
                       utt.fs)
        print(f"wrote {args.dump_source}_residual.wav and _envelope.wav")
    prefix = Path(args.out_prefix) if args.out_prefix else None
    if prefix:
        write_epochs_ascii(prefix.with_suffix(".txt"), train)
        write_epochs_json(prefix.with_suffix(".json"), train)
        print(f"wrote {prefix.with_suffix('.txt')} and .json ({len(train)} epochs)")
    else:
        for idx in train.indices:
            print(int(idx))
    return 0


def cmd_hngd(args) -> int:
    cfg = build_pipeline_config(args)
    utt = load_utterance(args.wav)
    if cfg.fs_policy == "8k":
        from .corpus import resample_to_8k
        utt = resample_to_8k(utt)
    train = _epochs_for(utt, cfg)
    if len(train) == 0:
        raise SystemExit("no epochs detected")
    if args.all:
        spectra = []
        for e in train.indices:
            try:
                spectra.append(hngd_at_epoch(utt, int(e), cfg.ztw_ms, cfg.nfft,
                                             cfg.ztw_end_taper))
            except Exception:
                continue
        out = Path(args.out or "hngd.npz")
        write_spectrum_npz(out, spectra)
        print(f"wrote {len(spectra)} spectra to {out}")
        return 0
    if not 0 <= args.epoch < len(train):
        raise SystemExit(f"epoch index out of range (0..{len(train) - 1})")
    spec = hngd_at_epoch(utt, int(train.indices[args.epoch]), cfg.ztw_ms,
                         cfg.nfft, cfg.ztw_end_taper)
    if args.out:
        write_spectrum_csv(args.out, [spec])
        print(f"wrote {args.out}")
    else:
        sys.stdout.write("epoch_sample,bin_hz,magnitude\n")
        for hz, mag in zip(spec.freqs, spec.magnitudes):
            sys.stdout.write(f"{spec.epoch_index},{hz:.6g},{mag:.9g}\n")
    return 0


def cmd_extract(args) -> int:
    cfg = build_pipeline_config(args)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    utts = _load_corpus(args)

    norm_path = Path(args.norm_stats) if args.norm_stats else outdir / "norm_stats.json"
    weights_path = (Path(args.weights_json) if args.weights_json
                    else outdir / "weights.json")
    norm = load_norm_stats(norm_path) if norm_path.is_file() else None
    weights = load_weights(weights_path) if weights_path.is_file() else None

    result = extract_corpus(utts, cfg, norm, weights, jobs=args.jobs)
    write_epoch_csv(outdir / "features_epoch.csv", result)
    write_frame_csv(outdir / "features_frame.csv", result)
    if result.norm_fitted_here:
        save_norm_stats(norm_path, result.norm_stats)
    if result.weights is not None and not weights_path.is_file():
        save_weights(weights_path, result.weights)
    if result.class_stats is not None:
        plots.plot_class_distributions(result.class_stats,
                                       outdir / "distributions.png")
        write_class_stats_csv(outdir / "class_stats.csv", result.class_stats)
    meta = {
        "n_utterances": len(result.utterances),
        "n_valid_rows": int(sum(uf.valid.sum() for uf in result.utterances)),
        "n_skipped_edge": int(sum(uf.n_skipped_edge for uf in result.utterances)),
        "n_invalid_spectrum": int(sum(uf.n_invalid_spectrum
                                      for uf in result.utterances)),
        "norm_stats": str(norm_path),
        "norm_fitted_here": result.norm_fitted_here,
        "weights": str(weights_path) if result.weights is not None else None,
        "snr_db": args.snr,
        "config": {f.name: getattr(cfg, f.name) for f in dc_fields(PipelineConfig)},
    }
    with open(outdir / "extract_meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    print(f"extracted {meta['n_valid_rows']} rows from "
          f"{meta['n_utterances']} utterances into {outdir}")
    return 0


def _require_labeled(classes, what="rows"):
    labeled = [c for c in classes if c is not None]
    if not labeled:
        raise SystemExit(f"no labeled {what}; supply .phn files")


def cmd_weights(args) -> int:
    _ids, _samples, classes, _raw, normed = read_epoch_csv(args.features)
    _require_labeled(classes)
    keep = [i for i, c in enumerate(classes)
            if c is not None and c is not SonorantClass.NON_SONORANT]
    rows = normed[keep]
    labels = [classes[i] for i in keep]
    stats = fit_class_gaussians(rows, labels, names=FEATURE_NAMES)
    vec = weights_from_stats(stats)
    out = Path(args.out)
    save_weights(out, vec)
    plots.plot_class_distributions(stats, out.with_suffix(".png"))
    for name, kld, w in zip(vec.names, vec.avg_klds, vec.weights):
        print(f"{name}: avg_kld={kld:.4f} weight={w:.4f}")
    print(f"wrote {out} and {out.with_suffix('.png')}")
    return 0


def cmd_sweep_k(args) -> int:
    cfg = build_pipeline_config(args)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    utts = _load_corpus(args)
    by_class: dict = {}
    for utt in utts:
        if cfg.fs_policy == "8k":
            from .corpus import resample_to_8k
            utt = resample_to_8k(utt)
        if not utt.labels:
            continue
        train = _epochs_for(utt, cfg)
        if len(train) < 4:
            continue
        # one cycle set per labeled sonorant span with enough epochs in it
        for span in utt.labels:
            cls = span.sonorant_class
            if cls is SonorantClass.NON_SONORANT:
                continue
            inside = train.indices[(train.indices >= span.start)
                                   & (train.indices < span.end)]
            if len(inside) < 4:
                continue
            from .epochs import EpochTrain
            sub = EpochTrain(inside, train.fs, train.edge_guard)
            cycles = extract_cycles(utt, sub)
            by_class.setdefault(cls, []).append((cycles, len(inside)))
    if len(by_class) < 2:
        raise SystemExit("need labeled spans from at least two classes")
    k_range = range(args.k_min, args.k_max + 1)
    curve, best = sweep_k(by_class, k_range)
    write_sweep_csv(outdir / "sweep_k.csv", curve)
    plots.plot_sweep(curve, outdir / "sweep_k.png", best)
    print(f"best K = {best}; wrote {outdir / 'sweep_k.csv'} and sweep_k.png")
    return 0


def _weighted_from_csv(path, weights):
    ids, samples, classes, _raw, normed = read_epoch_csv(path)
    return ids, samples, classes, assemble_weighted(normed, weights)


def cmd_classify(args) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if not args.weights_json:
        raise SystemExit("--weights-json is required")
    weights = load_weights(args.weights_json)
    _tid, _tsm, train_cls, train_rows = _weighted_from_csv(args.train, weights)
    ids, samples, test_cls, test_rows = _weighted_from_csv(args.test, weights)
    _require_labeled(train_cls, "training rows")
    _require_labeled(test_cls, "test rows")
    keep_tr = [i for i, c in enumerate(train_cls) if c is not None]
    keep_te = [i for i, c in enumerate(test_cls) if c is not None]
    report, model = gaussian_classify(
        train_rows[keep_tr], [train_cls[i] for i in keep_tr],
        test_rows[keep_te], [test_cls[i] for i in keep_te],
        weights={n: float(w) for n, w in zip(weights.names, weights.weights)})
    report.save_json(outdir / "report.json")
    (outdir / "report.txt").write_text(report.text_table() + "\n")
    plots.plot_confusion(report, outdir / "confusion.png")
    write_posteriors_csv(outdir / "posteriors.csv", model, test_rows[keep_te],
                         [ids[i] for i in keep_te],
                         [int(samples[i]) for i in keep_te])
    print(report.text_table())
    print(f"wrote report.json, report.txt, confusion.png, posteriors.csv in {outdir}")
    return 0


def cmd_detect(args) -> int:
    cfg = build_pipeline_config(args)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if not args.weights_json:
        raise SystemExit("--weights-json is required")
    weights = load_weights(args.weights_json)
    _tid, _tsm, train_cls, train_rows = _weighted_from_csv(args.train, weights)
    keep = [i for i, c in enumerate(train_cls) if c is not None]
    try:
        detector = fit_sonorant_detector(train_rows[keep],
                                         [train_cls[i] for i in keep],
                                         args.threshold)
    except ValueError as exc:
        raise SystemExit(f"detect: {exc}")
    results = {}
    for test_csv in args.test:
        name = Path(test_csv).stem
        ids, samples, test_cls, test_rows = _weighted_from_csv(test_csv, weights)
        keep_te = [i for i, c in enumerate(test_cls) if c is not None]
        report = sonorant_detect(detector, test_rows[keep_te],
                                 [test_cls[i] for i in keep_te])
        frows, ftruth = aggregate_frames_for_detection(
            [ids[i] for i in keep_te], samples[keep_te], test_rows[keep_te],
            [test_cls[i] for i in keep_te], fs=8000,
            frame_ms=cfg.agg_frame_ms, shift_ms=cfg.agg_shift_ms)
        frame_report = sonorant_detect(detector, frows, ftruth, level="frame")
        results[name] = report
        report.extra["frame_level"] = {
            "accuracy_pct": round(frame_report.accuracy, 4),
            "tpr_pct": round(frame_report.tpr, 4),
            "far_pct": round(frame_report.far, 4),
        }
        report.save_json(outdir / f"detect_{name}.json")
        print(f"{name}: epoch Acc {report.accuracy:.2f} TPR {report.tpr:.2f} "
              f"FAR {report.far:.2f} | frame Acc {frame_report.accuracy:.2f} "
              f"TPR {frame_report.tpr:.2f} FAR {frame_report.far:.2f}")
    if len(results) > 1:
        plots.plot_detection_vs_snr(results, outdir / "detect_vs_condition.png")
    return 0


def cmd_corr(args) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    _ids, _samples, _classes, _raw, normed = read_epoch_csv(args.features)
    n_dims = args.dims
    matrix = pairwise_correlation(normed[:, :n_dims])
    names = FEATURE_NAMES[:n_dims]
    with open(outdir / "correlation.csv", "w") as fh:
        fh.write("," + ",".join(names) + "\n")
        for i, name in enumerate(names):
            fh.write(name + "," + ",".join(f"{v:.4f}" for v in matrix[i]) + "\n")
    plots.plot_correlation(matrix, names, outdir / "correlation.png")
    for i in range(n_dims):
        for j in range(i + 1, n_dims):
            print(f"{names[i]} vs {names[j]}: {matrix[i, j]:.4f}")
    print(f"wrote correlation.csv and correlation.png in {outdir}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sonofeat",
        description="Epoch-synchronous sonority feature extraction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic test signals")
    p.add_argument("--out-dir", default="synth_out")
    p.add_argument("--corpus", choices=["single", "continuum", "vowels"],
                   default="single")
    p.add_argument("--pitch", type=float, default=120.0)
    p.add_argument("--formants", default="700:130:1,1220:70:0.7,2600:160:0.4")
    p.add_argument("--duration", type=float, default=0.5)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--noise-floor", dest="noise_floor", type=float, default=0.0)
    p.add_argument("--per-class", dest="per_class", type=int, default=10)
    p.add_argument("--nonsonorant", type=int, default=0,
                   help="extra noise utterances labeled sil (continuum corpus)")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--name")
    add_global_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("epochs", help="detect glottal closure instants")
    p.add_argument("wav")
    p.add_argument("--out-prefix", dest="out_prefix")
    p.add_argument("--raw", action="store_true",
                   help="skip Hilbert-envelope refinement")
    p.add_argument("--dump-source", dest="dump_source",
                   help="write <prefix>_residual.wav and _envelope.wav (float)")
    add_global_flags(p)
    p.set_defaults(func=cmd_epochs)

    p = sub.add_parser("hngd", help="dump HNGD spectra")
    p.add_argument("wav")
    p.add_argument("--epoch", type=int, default=0, help="epoch ordinal")
    p.add_argument("--all", action="store_true", help="binary dump of all epochs")
    p.add_argument("--out")
    add_global_flags(p)
    p.set_defaults(func=cmd_hngd)

    p = sub.add_parser("extract", help="run the full feature pipeline")
    p.add_argument("inputs", nargs="+", help="wav files or directories")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--phn-dir", dest="phn_dir")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes over utterances")
    add_global_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("weights", help="derive KLD fusion weights from features")
    p.add_argument("--features", required=True, help="epoch feature CSV")
    p.add_argument("--out", default="weights.json")
    add_global_flags(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("sweep-k", help="suprasegmental K selection sweep")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--phn-dir", dest="phn_dir")
    p.add_argument("--k-min", dest="k_min", type=int, default=4)
    p.add_argument("--k-max", dest="k_max", type=int, default=19)
    add_global_flags(p)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("classify", help="six-class Gaussian classification")
    p.add_argument("--train", required=True, help="training epoch CSV")
    p.add_argument("--test", required=True, help="test epoch CSV")
    p.add_argument("--out-dir", required=True)
    add_global_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("detect", help="sonorant/non-sonorant detection")
    p.add_argument("--train", required=True)
    p.add_argument("--test", nargs="+", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    add_global_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("corr", help="pairwise feature correlation matrix")
    p.add_argument("--features", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dims", type=int, default=5)
    add_global_flags(p)
    p.set_defaults(func=cmd_corr)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s: %(message)s")
    from .corpus import load_class_overrides, set_class_overrides
    set_class_overrides(load_class_overrides(args.phone_map)
                        if getattr(args, "phone_map", None) else None)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
