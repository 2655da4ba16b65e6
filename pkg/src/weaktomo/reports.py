"""Report emission: delimited tables, JSON documents, and figures.

Numeric cells use the shortest round-trip decimal representation of the
binary64 value (Python's float repr), so reruns of the same seeded
configuration produce byte-identical CSV and JSON.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import JointDistribution, SampleSummary, SweepResult


def format_number(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else format_number(c) for c in row])


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {k: _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    return obj


def write_json(path: Path, document: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_to_jsonable(document), fh, indent=2)
        fh.write("\n")


def render_matrix_figure(matrix: np.ndarray, path: Path, title: str) -> None:
    """Real and imaginary parts of an operator as annotated heatmaps."""
    matrix = np.asarray(matrix)
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.6))
    vmax = max(float(np.abs(matrix).max()), 1e-12)
    for ax, part, name in ((axes[0], matrix.real, "Re"), (axes[1], matrix.imag, "Im")):
        im = ax.imshow(part, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        ax.set_title(f"{name} {title}")
        ax.set_xlabel("column")
        ax.set_ylabel("row")
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_spectrum_figure(spectra: dict[str, np.ndarray], path: Path, title: str) -> None:
    """Eigenvalue spectra per outcome; negative bars show up below the axis."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    width = 0.8 / max(len(spectra), 1)
    for k, (label, vals) in enumerate(spectra.items()):
        vals = np.asarray(vals)
        ax.bar(np.arange(len(vals)) + k * width, vals, width=width, label=label)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("eigenvalue index (ascending)")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_table_figure(
    table: np.ndarray,
    row_labels: tuple[str, ...],
    col_labels: tuple[str, ...],
    path: Path,
    title: str,
) -> None:
    """Signed heatmap of a joint (quasi-)probability or count table."""
    table = np.asarray(table, dtype=float)
    fig, ax = plt.subplots(figsize=(1.2 + 0.6 * len(col_labels), 1.2 + 0.5 * len(row_labels)))
    vmax = max(float(np.abs(table).max()), 1e-12)
    im = ax.imshow(table, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
    ax.set_xticks(range(len(col_labels)), col_labels, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(len(row_labels)), row_labels, fontsize=8)
    ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep_figure(result: SweepResult, path: Path) -> None:
    """Log-log error curve with the fitted power law overlaid."""
    xs = np.array([p.parameter for p in result.points])
    ys = np.array([max(p.error, 1e-300) for p in result.points])
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.loglog(xs, ys, "o-", label="measured error")
    lo, hi = result.fit_range
    mask = (xs >= lo) & (xs <= hi)
    if ys[mask].min() > 1e-250:
        fit = 10.0 ** (result.fit_intercept + result.fitted_slope * np.log10(xs[mask]))
        ax.loglog(xs[mask], fit, "--", label=f"slope {result.fitted_slope:.3f}")
    xlabel = "measurement strength" if result.axis == "epsilon" else "sample count"
    ax.set_xlabel(xlabel)
    ax.set_ylabel("trace distance")
    title = f"{result.scenario}: {result.axis} sweep ({result.mode})"
    if result.postselect_label is not None:
        title += f", post-selected {result.postselect_label}"
    ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_counts_figure(summary: SampleSummary, path: Path) -> None:
    render_table_figure(
        summary.counts.astype(float),
        summary.weak_labels,
        summary.final_labels,
        path,
        f"counts, N = {summary.total}",
    )


def render_joint_distribution_figure(dist: JointDistribution, path: Path) -> None:
    render_table_figure(
        dist.probabilities,
        dist.weak_labels,
        dist.final_labels,
        path,
        f"joint table ({dist.mode})",
    )
