"""Desk-scale evaluation: diagonal-covariance Gaussian classification,
sonorant/non-sonorant detection metrics, and epoch alignment scoring.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import SonorantClass
from .fusion import SIGMA_FLOOR, DegenerateStats


@dataclass
class GaussianModel:
    """Per-class diagonal Gaussian likelihood scorer."""

    classes: list
    mean: np.ndarray   # (n_classes, n_dims)
    var: np.ndarray

    def log_likelihood(self, rows: np.ndarray) -> np.ndarray:
        """(n_rows, n_classes) log-likelihoods."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        out = np.empty((len(rows), len(self.classes)))
        for ci in range(len(self.classes)):
            diff = rows - self.mean[ci]
            out[:, ci] = -0.5 * np.sum(
                np.log(2.0 * np.pi * self.var[ci]) + diff * diff / self.var[ci],
                axis=1)
        return out

    def posteriors(self, rows: np.ndarray) -> np.ndarray:
        ll = self.log_likelihood(rows)
        ll -= ll.max(axis=1, keepdims=True)
        p = np.exp(ll)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, rows: np.ndarray) -> list:
        idx = np.argmax(self.log_likelihood(rows), axis=1)
        return [self.classes[i] for i in idx]


def fit_gaussian_model(rows: np.ndarray, labels, classes=None) -> GaussianModel:
    rows = np.asarray(rows, dtype=np.float64)
    labels = list(labels)
    if classes is None:
        classes = sorted(set(labels), key=lambda c: getattr(c, "value", c))
    if len(classes) < 2:
        raise ValueError("need at least two classes in training data")
    mean = np.empty((len(classes), rows.shape[1]))
    var = np.empty_like(mean)
    for ci, cls in enumerate(classes):
        sub = rows[np.array([lab == cls for lab in labels])]
        if len(sub) < 2:
            raise DegenerateStats(f"class {cls} has {len(sub)} training rows")
        mean[ci] = sub.mean(axis=0)
        var[ci] = sub.var(axis=0, ddof=1)
        if np.any(var[ci] < SIGMA_FLOOR ** 2):
            raise DegenerateStats(f"degenerate variance in class {cls}")
    return GaussianModel(list(classes), mean, var)


@dataclass
class EvalReport:
    """Classification report: row-stochastic confusion percentages plus the
    sonorant-detection summary metrics."""

    classes: list
    confusion_counts: np.ndarray
    accuracy: float
    tpr: float | None = None
    far: float | None = None
    weights: dict | None = None
    runtime_s: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def confusion_pct(self) -> np.ndarray:
        counts = self.confusion_counts.astype(np.float64)
        totals = counts.sum(axis=1, keepdims=True)
        totals[totals == 0] = 1.0
        return 100.0 * counts / totals

    @property
    def per_class_accuracy(self) -> np.ndarray:
        return np.diag(self.confusion_pct)

    def _class_label(self, cls) -> str:
        return cls.label if isinstance(cls, SonorantClass) else str(cls)

    def to_dict(self) -> dict:
        d = {
            "classes": [self._class_label(c) for c in self.classes],
            "confusion_counts": self.confusion_counts.tolist(),
            "confusion_pct": np.round(self.confusion_pct, 4).tolist(),
            "accuracy_pct": round(self.accuracy, 4),
            "runtime_s": round(self.runtime_s, 6),
        }
        if self.tpr is not None:
            d["tpr_pct"] = round(self.tpr, 4)
        if self.far is not None:
            d["far_pct"] = round(self.far, 4)
        if self.weights is not None:
            d["weights"] = self.weights
        d.update(self.extra)
        return d

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def text_table(self) -> str:
        names = [self._class_label(c) for c in self.classes]
        width = max(12, max(len(n) for n in names) + 1)
        pct = self.confusion_pct
        lines = ["confusion matrix (% of true-class rows):"]
        lines.append(" " * width + "".join(f"{n:>{width}}" for n in names))
        for i, n in enumerate(names):
            row = "".join(f"{pct[i, j]:>{width}.1f}" for j in range(len(names)))
            lines.append(f"{n:<{width}}" + row)
        lines.append(f"accuracy: {self.accuracy:.2f}%")
        if self.tpr is not None:
            lines.append(f"TPR: {self.tpr:.2f}%   FAR: {self.far:.2f}%")
        return "\n".join(lines)


def confusion_matrix(truth, predicted, classes) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(truth, predicted):
        counts[index[t], index[p]] += 1
    return counts


def detection_metrics(truth_sonorant, predicted_sonorant) -> tuple[float, float, float]:
    """(accuracy, TPR, FAR) in percent.  TPR counts sonorant items predicted
    sonorant; FAR counts non-sonorant items predicted sonorant."""
    t = np.asarray(truth_sonorant, dtype=bool)
    p = np.asarray(predicted_sonorant, dtype=bool)
    if len(t) == 0:
        raise ValueError("no items to score")
    acc = 100.0 * np.mean(t == p)
    tpr = 100.0 * (np.mean(p[t]) if t.any() else 0.0)
    far = 100.0 * (np.mean(p[~t]) if (~t).any() else 0.0)
    return float(acc), float(tpr), float(far)


def gaussian_classify(train_rows, train_labels, test_rows, test_labels,
                      weights: dict | None = None) -> tuple[EvalReport, GaussianModel]:
    """Train the diagonal-Gaussian scorer and report the confusion matrix and
    metrics on the test rows.  Test classes unseen in training keep their
    confusion rows (they can only ever be misclassified)."""
    t0 = time.perf_counter()
    model = fit_gaussian_model(train_rows, train_labels)
    predicted = model.predict(test_rows)
    extra = sorted(set(test_labels) - set(model.classes),
                   key=lambda c: getattr(c, "value", c))
    classes = list(model.classes) + extra
    counts = confusion_matrix(test_labels, predicted, classes)
    acc = 100.0 * np.trace(counts) / counts.sum()
    report = EvalReport(classes, counts, float(acc), weights=weights,
                        runtime_s=time.perf_counter() - t0)
    son = [c for c in classes
           if isinstance(c, SonorantClass) and c is not SonorantClass.NON_SONORANT]
    if son and SonorantClass.NON_SONORANT in classes:
        truth = [c is not SonorantClass.NON_SONORANT for c in test_labels]
        pred = [c is not SonorantClass.NON_SONORANT for c in predicted]
        report.accuracy = acc
        _, report.tpr, report.far = detection_metrics(truth, pred)
    return report, model


def write_posteriors_csv(path, model: GaussianModel, rows, utt_ids=None,
                         epoch_samples=None) -> None:
    """Per-class posterior probabilities, format-compatible with external
    score-fusion harnesses."""
    post = model.posteriors(rows)
    names = [c.label if isinstance(c, SonorantClass) else str(c)
             for c in model.classes]
    with open(path, "w") as fh:
        fh.write("utt_id,epoch_sample," + ",".join(names) + "\n")
        for i in range(len(post)):
            uid = utt_ids[i] if utt_ids is not None else ""
            es = epoch_samples[i] if epoch_samples is not None else ""
            fh.write(f"{uid},{es}," + ",".join(f"{p:.9g}" for p in post[i]) + "\n")


@dataclass
class SonorantDetector:
    """Binary sonorant/non-sonorant scorer: log-likelihood ratio of two
    pooled diagonal Gaussians against a threshold."""

    model: GaussianModel
    threshold: float = 0.0

    def predict(self, rows: np.ndarray) -> np.ndarray:
        ll = self.model.log_likelihood(rows)
        i_son = self.model.classes.index("sonorant")
        i_non = self.model.classes.index("non_sonorant")
        return (ll[:, i_son] - ll[:, i_non]) > self.threshold


def fit_sonorant_detector(rows, labels, threshold: float = 0.0) -> SonorantDetector:
    binary = ["sonorant" if (isinstance(c, SonorantClass)
                             and c is not SonorantClass.NON_SONORANT)
              else "non_sonorant" for c in labels]
    if "non_sonorant" not in binary:
        raise ValueError("no non-sonorant training data")
    if "sonorant" not in binary:
        raise ValueError("no sonorant training data")
    model = fit_gaussian_model(np.asarray(rows), binary,
                               classes=["non_sonorant", "sonorant"])
    return SonorantDetector(model, threshold)


def sonorant_detect(detector: SonorantDetector, rows, labels,
                    level: str = "epoch") -> EvalReport:
    """Score sonorant detection; ``labels`` are SonorantClass values."""
    t0 = time.perf_counter()
    truth = [isinstance(c, SonorantClass) and c is not SonorantClass.NON_SONORANT
             for c in labels]
    if not any(not t for t in truth):
        raise ValueError("no non-sonorant data to score")
    pred = detector.predict(np.asarray(rows))
    acc, tpr, far = detection_metrics(truth, pred)
    counts = confusion_matrix(
        ["sonorant" if t else "non_sonorant" for t in truth],
        ["sonorant" if p else "non_sonorant" for p in pred],
        ["non_sonorant", "sonorant"])
    return EvalReport(["non_sonorant", "sonorant"], counts, acc, tpr, far,
                      runtime_s=time.perf_counter() - t0,
                      extra={"level": level})


def aggregate_frames_for_detection(utt_ids, epoch_samples, rows, labels,
                                   fs: int, frame_ms: float = 25.0,
                                   shift_ms: float = 10.0):
    """Frame-level view of per-epoch rows: features averaged per frame (one
    block per utterance) and the majority sonorant/non-sonorant truth of the
    epochs inside.  Frames without epochs carry no evidence and are skipped."""
    from .fusion import frame_aggregate

    rows = np.asarray(rows, dtype=np.float64)
    epoch_samples = np.asarray(epoch_samples, dtype=np.int64)
    son = np.array([isinstance(c, SonorantClass)
                    and c is not SonorantClass.NON_SONORANT for c in labels])
    frame_rows, frame_truth = [], []
    for uid in dict.fromkeys(utt_ids):
        mask = np.array([u == uid for u in utt_ids])
        starts, feats, counts = frame_aggregate(epoch_samples[mask], rows[mask],
                                                fs, frame_ms, shift_ms)
        es = epoch_samples[mask]
        sn = son[mask]
        flen = int(round(frame_ms * fs / 1000.0))
        for fi, start in enumerate(starts):
            if counts[fi] == 0:
                continue
            in_frame = (es >= start) & (es < start + flen)
            frame_rows.append(feats[fi])
            frame_truth.append(np.mean(sn[in_frame]) >= 0.5)
    cls = [SonorantClass.LOW_VOWEL if t else SonorantClass.NON_SONORANT
           for t in frame_truth]
    return np.array(frame_rows), cls


def score_epochs(detected: np.ndarray, truth: np.ndarray, fs: int,
                 accuracy_ms: float = 0.25, match_ms: float = 1.0,
                 guard: int = 0, n_samples: int | None = None) -> dict:
    """Alignment metrics between detected and ground-truth epoch indices.

    Ground-truth instants inside the edge guard (where detection is blind by
    design) are excluded.  A detection matches the nearest truth instant
    within ``match_ms``; accuracy counts matches within ``accuracy_ms``.
    """
    detected = np.asarray(detected, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if guard and n_samples:
        truth = truth[(truth >= guard) & (truth < n_samples - guard)]
    acc_tol = accuracy_ms * fs / 1000.0
    match_tol = match_ms * fs / 1000.0
    n_acc = n_match = 0
    for d in detected:
        if len(truth) == 0:
            break
        dist = np.min(np.abs(truth - d))
        if dist <= match_tol:
            n_match += 1
            if dist <= acc_tol:
                n_acc += 1
    misses = sum(1 for t in truth
                 if len(detected) == 0 or np.min(np.abs(detected - t)) > match_tol)
    return {
        "n_detected": int(len(detected)),
        "n_truth": int(len(truth)),
        "accurate_frac": n_acc / len(detected) if len(detected) else 0.0,
        "miss_rate": misses / len(truth) if len(truth) else 0.0,
        "false_alarm_rate": (len(detected) - n_match) / len(detected)
                            if len(detected) else 0.0,
    }
