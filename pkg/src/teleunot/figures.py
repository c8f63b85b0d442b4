"""Render delay-scan reports as figures next to the delimited data files."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import ScanReport

__all__ = ["render_scan_figure"]


def render_scan_figure(report: ScanReport, path: str) -> None:
    """Plot both coincidence series versus stage position and save to ``path``."""
    z = [row.z for row in report.rows]
    clone = [row.c_clone for row in report.rows]
    anti = [row.c_anti for row in report.rows]

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.errorbar(
        z, clone, yerr=[math.sqrt(c) for c in clone],
        fmt="o", color="tab:blue", label="[D_A1, D_A2] clone coincidences",
    )
    ax.errorbar(
        z, anti, yerr=[math.sqrt(c) for c in anti],
        fmt="s", color="tab:red", mfc="none", label="[D_A2, D_B] anti-clone coincidences",
    )
    if report.summary is not None:
        ax.axhline(report.summary.baseline_clone_mean, color="gray", lw=0.8, ls="--")
        ax.set_title(
            f"peak R = {report.summary.peak_r:.3f} +/- {report.summary.peak_r_sigma:.3f},  "
            f"F = {report.summary.peak_f:.4f} +/- {report.summary.peak_f_sigma:.4f}"
        )
    ax.set_xlabel("stage position Z (um)")
    ax.set_ylabel(f"coincidences per {report.metadata.trials_per_z} trials")
    ax.legend(loc="center left", fontsize=9)
    fig.tight_layout()
    try:
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise OSError(f"cannot write figure to {path}: {exc}") from exc
    finally:
        plt.close(fig)
