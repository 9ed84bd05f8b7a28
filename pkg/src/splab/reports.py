"""Report rendering: CSV tables, a dependency-free SVG heatmap, and
matplotlib PNG figures written alongside the delimited output."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .ioutil import atomic_write_bytes, atomic_write_text
from .metagame import SUPPORT_EPS, format_cell

# Diverging endpoints around the 0.5 midpoint: losing entries red, winning
# entries blue, midpoint exactly white.
_RED = (178, 24, 43)
_BLUE = (33, 102, 172)
_WHITE = (255, 255, 255)


def heatmap_color(w: float) -> str:
    """Hex cell color for a winrate in [0, 1]; w = 0.5 is exactly #ffffff."""
    w = min(1.0, max(0.0, float(w)))
    if w >= 0.5:
        t = (w - 0.5) * 2.0
        end = _BLUE
    else:
        t = (0.5 - w) * 2.0
        end = _RED
    rgb = tuple(round(255 + (c - 255) * t) for c in end)
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heatmap_svg(entries: np.ndarray, row_labels: Sequence[str],
                col_labels: Sequence[str], cell: int = 18) -> str:
    """Self-contained SVG grid of winrate cells, bit-stable across runs."""
    entries = np.atleast_2d(np.asarray(entries, dtype=float))
    m, k = entries.shape
    margin = 4 * cell
    width = margin + k * cell + cell
    height = margin + m * cell + cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    fs = max(6, cell // 2)
    for j, lab in enumerate(col_labels):
        x = margin + j * cell + cell // 2
        parts.append(
            f'<text x="{x}" y="{margin - 6}" font-size="{fs}" '
            f'font-family="monospace" text-anchor="end" '
            f'transform="rotate(-90 {x} {margin - 6})">{lab}</text>')
    for i, lab in enumerate(row_labels):
        y = margin + i * cell + cell // 2 + fs // 2
        parts.append(
            f'<text x="{margin - 6}" y="{y}" font-size="{fs}" '
            f'font-family="monospace" text-anchor="end">{lab}</text>')
    for i in range(m):
        for j in range(k):
            x = margin + j * cell
            y = margin + i * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{heatmap_color(entries[i, j])}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_heatmap_svg(path: Path | str, entries: np.ndarray,
                      row_labels: Sequence[str], col_labels: Sequence[str]) -> None:
    atomic_write_text(path, heatmap_svg(entries, row_labels, col_labels))


def write_vector_csv(path: Path | str, header: tuple[str, str],
                     rows: Sequence[tuple[str, float]]) -> None:
    """Two-column CSV: label/index plus a 6-decimal value."""
    lines = [f"{header[0]},{header[1]}"]
    for label, value in rows:
        lines.append(f"{label},{format_cell(value)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def serialized_probs(probs: np.ndarray) -> list[float]:
    """Probabilities with sub-threshold entries snapped to exact 0."""
    return [0.0 if p < SUPPORT_EPS else float(p) for p in probs]


def write_json_report(path: Path | str, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def winrate_figure_png(path: Path | str, entries: np.ndarray,
                       labels: Sequence[str],
                       support: np.ndarray | None = None) -> None:
    """Winrate-matrix heatmap with an optional Nash-support strip below."""
    entries = np.atleast_2d(np.asarray(entries, dtype=float))
    n = entries.shape[0]
    if support is not None:
        fig, (ax, ax2) = plt.subplots(
            2, 1, figsize=(6, 7.2), height_ratios=[5, 1], constrained_layout=True)
    else:
        fig, ax = plt.subplots(figsize=(6, 6), constrained_layout=True)
        ax2 = None
    im = ax.imshow(entries, cmap="RdBu", vmin=0.0, vmax=1.0)
    ax.set_title("winrate matrix")
    step = max(1, n // 16)
    ticks = list(range(0, n, step))
    ax.set_xticks(ticks, [labels[t] for t in ticks], rotation=90, fontsize=7)
    ax.set_yticks(ticks, [labels[t] for t in ticks], fontsize=7)
    fig.colorbar(im, ax=ax, shrink=0.8)
    if ax2 is not None:
        ax2.bar(range(n), np.asarray(support, dtype=float), color="#2166ac")
        ax2.set_xlim(-0.5, n - 0.5)
        ax2.set_title("equilibrium support")
        ax2.set_xticks(ticks, [labels[t] for t in ticks], rotation=90, fontsize=7)
    _save_png(fig, path)


def rpp_figure_png(path: Path | str, values: np.ndarray) -> None:
    """Evolution of the population-vs-population game value."""
    values = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    ax.plot(range(1, values.size + 1), values, marker="o", markersize=3,
            color="#2166ac")
    ax.axhline(0.0, color="#888888", linewidth=1)
    ax.set_xlabel("population size (leading checkpoints)")
    ax.set_ylabel("relative population performance")
    _save_png(fig, path)


def _save_png(fig, path: Path | str) -> None:
    import io as _io

    buf = _io.BytesIO()
    fig.savefig(buf, format="png", dpi=110)
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())
