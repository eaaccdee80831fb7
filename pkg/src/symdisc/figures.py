"""Figure rendering for the CLI report paths.

Every helper takes explicit data plus an output path and writes one PNG
with the Agg backend (no display server needed).  Figures are optional
companions to the delimited output, never a source of truth; nothing
here feeds back into any computation.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .polyalg import ExpSum  # noqa: E402

__all__ = [
    "heatmap_t2",
    "curve",
    "critical_points_figure",
    "separation_figure",
]


def heatmap_t2(F: ExpSum, path: str, marks: Sequence[Sequence[float]] = (),
               title: str = "", res: int = 400) -> str:
    """|F| over the two-torus as an image, with optional marked angles."""
    if F.m != 2:
        raise ValueError("heatmap needs a two-angle exponential sum")
    ax1 = np.linspace(0.0, 2 * np.pi, res)
    A, B = np.meshgrid(ax1, ax1, indexing="ij")
    pts = np.stack([A.reshape(-1), B.reshape(-1)], axis=1)
    vals = np.abs(F.eval_batch(pts)).reshape(res, res)
    fig, ax = plt.subplots(figsize=(6.4, 5.4))
    im = ax.imshow(vals.T, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi),
                   aspect="equal", cmap="viridis")
    fig.colorbar(im, ax=ax, shrink=0.9)
    for mk in marks:
        ax.plot(mk[0], mk[1], "rx", markersize=9, markeredgewidth=2)
    ax.set_xlabel("theta_1")
    ax.set_ylabel("theta_2")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def curve(xs: Sequence[float], ys: Sequence[float], path: str,
          marks: Sequence[tuple] = (), xlabel: str = "", ylabel: str = "",
          title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(list(xs), list(ys), "-", lw=1.4)
    for mx, my, label in marks:
        ax.plot(mx, my, "o", color="crimson")
        ax.annotate(label, (mx, my), textcoords="offset points",
                    xytext=(6, 6), fontsize=9)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def critical_points_figure(points, path: str, title: str = "") -> str:
    """Critical values with their sorted angle triples stacked below."""
    vals = [p.value for p in points]
    idx = list(range(len(points)))
    fig, (ax, ax2) = plt.subplots(
        2, 1, figsize=(7.2, 5.6), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]})
    ax.stem(idx, vals)
    ax.set_ylabel("h value")
    if title:
        ax.set_title(title)
    for j, p in enumerate(points):
        for a in p.angles:
            ax2.plot(j, a, "k.", markersize=4)
    ax2.set_ylabel("angles (rad)")
    ax2.set_xlabel("critical point (sorted by value)")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def separation_figure(C0: float, C1: float, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.bar(["C0 (order-1 metric)", "C1 (order-2 bound)"], [C0, C1],
           color=["#4878a8", "#b8434e"], width=0.55)
    lo = min(C0, C1)
    ax.set_ylim(lo - 0.004, max(C0, C1) + 0.002)
    ax.axhline(C0, color="#4878a8", lw=0.8, ls="--", alpha=0.7)
    ax.annotate(f"margin = {C1 - C0:.3e}",
                xy=(1, C1), xytext=(0.35, C1 + 0.0008), fontsize=10)
    ax.set_ylabel("metric value at 0 along e_2")
    ax.set_title("separation of invariant metrics")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
