"""Figure rendering for evaluation reports and detection grids.

Figures land next to the delimited output so a run leaves both the CSV (for
external tooling) and a ready-to-read PNG.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import EvalReport


def plot_eval_report(report: EvalReport, path, title: str | None = None):
    """Precision and recall versus SNR."""
    rows = sorted(report.rows, key=lambda r: r.snr_db)
    snr = [r.snr_db for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(snr, [r.recall for r in rows], "o-", label="recall")
    ax.plot(snr, [r.precision for r in rows], "s--", label="precision")
    ax.set_xlabel("SNR (dB, total signal power / total noise power)")
    ax.set_ylabel("score")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_detection_grid(grid_stats: np.ndarray, boxes_grid, path,
                        mask: np.ndarray | None = None):
    """Statistic waterfall (dB) with detected boxes outlined."""
    n = 1 if mask is None else 2
    fig, axes = plt.subplots(1, n, figsize=(6 * n, 5), squeeze=False)
    floor = np.max(grid_stats) * 1e-12 + 1e-300
    db = 10.0 * np.log10(np.maximum(grid_stats, floor))
    axes[0][0].imshow(db.T, origin="lower", aspect="auto", cmap="viridis",
                      interpolation="nearest")
    axes[0][0].set_title("radiometer statistics (dB)")
    panels = [axes[0][0]]
    if mask is not None:
        axes[0][1].imshow(mask.T, origin="lower", aspect="auto", cmap="gray",
                          interpolation="nearest")
        axes[0][1].set_title("decision mask")
        panels.append(axes[0][1])
    for ax in panels:
        for b in boxes_grid:
            ax.add_patch(plt.Rectangle(
                (b.t_lo - 0.5, b.f_lo - 0.5),
                b.t_hi - b.t_lo + 1, b.f_hi - b.f_lo + 1,
                fill=False, edgecolor="red", linewidth=1.0,
            ))
        ax.set_xlabel("time step")
        ax.set_ylabel("frequency channel")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
