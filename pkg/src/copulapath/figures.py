"""Matplotlib rendering of report bundles.

The CLI writes these PNGs next to the delimited output whenever a report
lands on disk; there is no standalone plotting entry point. All rendering
targets the Agg backend so headless runs work.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["mse_figure", "effects_figure", "save_report_figures"]

_BAR_COLORS = ("#3a6ea5", "#bf5b3d", "#6b8e23")


def mse_figure(report: dict):
    """Grouped bars: mean MSE (with SD whiskers) per method and partition."""
    indices = report.get("indices", {})
    methods = list(indices)
    partitions = [p for p in ("train", "test") if any(p in indices[m] for m in methods)]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    width = 0.8 / max(len(methods), 1)
    xs = np.arange(len(partitions))
    for i, method in enumerate(methods):
        means = [indices[method].get(p, {}).get("mean_mse", np.nan) for p in partitions]
        sds = [indices[method].get(p, {}).get("sd_mse", 0.0) for p in partitions]
        ax.bar(
            xs + i * width,
            means,
            width=width,
            yerr=sds,
            capsize=3,
            label=method,
            color=_BAR_COLORS[i % len(_BAR_COLORS)],
        )
    ax.set_xticks(xs + width * (len(methods) - 1) / 2)
    ax.set_xticklabels(partitions)
    ax.set_ylabel("mean MSE")
    ax.set_title(_title(report))
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def effects_figure(report: dict, partition: str = "train"):
    """Direct / indirect / total effect bars per variable, one panel per method."""
    effects = report.get("effects", {})
    methods = [m for m in effects if partition in effects[m]]
    if not methods:
        raise ValueError(f"report has no effects for partition {partition!r}")
    fig, axes = plt.subplots(
        1, len(methods), figsize=(4.8 * len(methods), 4.0), sharey=True, squeeze=False
    )
    for ax, method in zip(axes[0], methods):
        rows = effects[method][partition]
        labels = [row["var"] for row in rows]
        xs = np.arange(len(rows))
        for i, kind in enumerate(("direct", "indirect", "total")):
            ax.bar(
                xs + (i - 1) * 0.25,
                [row[kind] for row in rows],
                width=0.25,
                label=kind,
                color=_BAR_COLORS[i],
            )
        ax.axhline(0.0, color="black", linewidth=0.8)
        ax.set_xticks(xs)
        ax.set_xticklabels(labels)
        ax.set_title(f"{method} ({partition})")
    axes[0][0].set_ylabel("effect on y")
    axes[0][-1].legend(frameon=False)
    fig.suptitle(_title(report))
    fig.tight_layout()
    return fig


def _title(report: dict) -> str:
    if "scenario" in report:
        s = report["scenario"]
        return f"p={s['p']} {s['level']} n={s['n']}"
    meta = report.get("dataset", {})
    return str(meta.get("path", "fit"))


def save_report_figures(report: dict, outdir, stem: str = "report") -> list[str]:
    """Render the standard figures for a report; returns written paths."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    for name, fig in (("mse", mse_figure(report)), ("effects", effects_figure(report))):
        target = os.path.join(outdir, f"{stem}_{name}.png")
        fig.savefig(target, dpi=150)
        plt.close(fig)
        written.append(target)
    return written
