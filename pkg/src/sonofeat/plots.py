"""Report figures rendered alongside the delimited outputs.

All renderers write straight to files (Agg backend) so report generation
works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .corpus import SonorantClass
from .evaluate import EvalReport
from .fusion import ClassStats


def _label(cls) -> str:
    return cls.label if isinstance(cls, SonorantClass) else str(cls)


def plot_sweep(curve, path, best_k=None) -> None:
    """Average-KLD-vs-K curve from the suprasegmental sweep."""
    ks = [k for k, _ in curve]
    vals = [v for _, v in curve]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(ks, vals, "o-", color="tab:blue")
    if best_k is not None:
        ax.axvline(best_k, color="tab:red", ls="--", lw=1,
                   label=f"best K = {best_k}")
        ax.legend()
    ax.set_xlabel("K (pitch cycles)")
    ax.set_ylabel("average KLD")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_class_distributions(stats: ClassStats, path) -> None:
    """Fitted per-class Gaussian curves, one panel per feature dimension."""
    n_dims = len(stats.names)
    ncols = min(4, n_dims)
    nrows = int(np.ceil(n_dims / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows),
                             squeeze=False)
    x = np.linspace(0.0, 1.0, 400)
    for d in range(n_dims):
        ax = axes[d // ncols][d % ncols]
        for ci, cls in enumerate(stats.classes):
            mu, sig = stats.mean[ci, d], stats.std[ci, d]
            pdf = np.exp(-0.5 * ((x - mu) / sig) ** 2) / (sig * np.sqrt(2 * np.pi))
            ax.plot(x, pdf, label=_label(cls), lw=1.2)
        ax.set_title(stats.names[d])
        ax.set_yticks([])
    for d in range(n_dims, nrows * ncols):
        axes[d // ncols][d % ncols].axis("off")
    handles, labels = axes[0][0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=min(6, len(labels)),
               fontsize=8, frameon=False)
    fig.tight_layout(rect=(0, 0.08, 1, 1))
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_confusion(report: EvalReport, path) -> None:
    """Row-stochastic confusion matrix heatmap."""
    pct = report.confusion_pct
    names = [_label(c) for c in report.classes]
    fig, ax = plt.subplots(figsize=(1.1 * len(names) + 2, 1.0 * len(names) + 1.5))
    im = ax.imshow(pct, cmap="Blues", vmin=0, vmax=100)
    ax.set_xticks(range(len(names)), names, rotation=45, ha="right")
    ax.set_yticks(range(len(names)), names)
    for i in range(len(names)):
        for j in range(len(names)):
            ax.text(j, i, f"{pct[i, j]:.1f}", ha="center", va="center",
                    fontsize=8, color="black" if pct[i, j] < 60 else "white")
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(f"accuracy {report.accuracy:.1f}%")
    fig.colorbar(im, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_correlation(matrix: np.ndarray, names, path) -> None:
    """Pairwise feature-correlation heatmap."""
    fig, ax = plt.subplots(figsize=(1.0 * len(names) + 2, 1.0 * len(names) + 1.5))
    im = ax.imshow(matrix, cmap="viridis", vmin=0, vmax=1)
    ax.set_xticks(range(len(names)), names)
    ax.set_yticks(range(len(names)), names)
    for i in range(len(names)):
        for j in range(len(names)):
            ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center",
                    fontsize=8, color="white" if matrix[i, j] < 0.6 else "black")
    fig.colorbar(im, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_detection_vs_snr(results: dict, path) -> None:
    """Acc/TPR/FAR across SNR conditions (keys ordered clean -> low SNR)."""
    labels = list(results)
    acc = [results[k].accuracy for k in labels]
    tpr = [results[k].tpr for k in labels]
    far = [results[k].far for k in labels]
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    ax.plot(x, acc, "o-", label="Acc")
    ax.plot(x, tpr, "s-", label="TPR")
    ax.plot(x, far, "^-", label="FAR")
    ax.set_xticks(x, labels)
    ax.set_xlabel("condition")
    ax.set_ylabel("percent")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
