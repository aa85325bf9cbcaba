"""Render batch histogram families as bar-panel figures (PNG).

One figure per family and variant (raw / reassigned), one panel per parameter
set, mirroring the layout of the delimited summary the figures sit next to.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .experiments import REASSIGNED_SUFFIX
from .metrics import FAMILY_NAMES, SetSummary

_FAMILY_AXES = {
    "instances_per_level": ("level", "instances"),
    "width_per_level": ("level", "nodes"),
    "leaves_per_level": ("level", "leaves"),
    "children_per_level": ("level", "mean children"),
    "branching_factor": ("children", "nodes"),
}


def _render_family(summaries: list[SetSummary], family: str, path: Path) -> None:
    ncols = min(4, len(summaries))
    nrows = math.ceil(len(summaries) / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows), squeeze=False
    )
    for ax in axes.flat:
        ax.set_visible(False)
    for k, summary in enumerate(summaries):
        ax = axes[k // ncols][k % ncols]
        ax.set_visible(True)
        rows = summary.histograms.families.get(family, [])
        xs = [r[0] for r in rows]
        means = [r[1] for r in rows]
        stds = [r[2] for r in rows]
        ax.bar(xs, means, yerr=stds, color="tab:blue", ecolor="gray", capsize=1.5)
        ax.set_title(summary.label, fontsize=10)
        xlabel, ylabel = _FAMILY_AXES[family]
        ax.set_xlabel(xlabel, fontsize=8)
        ax.set_ylabel(ylabel, fontsize=8)
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_figures(summaries: list[SetSummary], outdir) -> list[Path]:
    """Write one PNG per (family, variant) present; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    groups = {
        "raw": [s for s in summaries if not s.label.endswith(REASSIGNED_SUFFIX)],
        "reassigned": [s for s in summaries if s.label.endswith(REASSIGNED_SUFFIX)],
    }
    written: list[Path] = []
    for variant, group in groups.items():
        if not group:
            continue
        for family in FAMILY_NAMES:
            path = outdir / f"{family}_{variant}.png"
            _render_family(group, family, path)
            written.append(path)
    return written
