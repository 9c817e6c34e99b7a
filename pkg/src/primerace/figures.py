"""Figure rendering for family reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .construct import FamilyReport


def render_family_figures(
    reports: Sequence[FamilyReport], out_dir, stem: str = "family"
) -> list[Path]:
    """Render moderacy-index and U-value figures; returns the written paths."""
    if not reports:
        raise ValueError("no reports to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    depths = [r.depth for r in reports]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(depths, [r.two_moderacy_index for r in reports], "o-", label="r(G)/sqrt(log d)")
    ax.plot(depths, [r.uniform_criterion for r in reports], "s--", label="uniform criterion")
    ax.set_xlabel("depth")
    ax.set_ylabel("index")
    ax.set_xticks(depths)
    ax.legend()
    ax.grid(True, alpha=0.3)
    index_path = out_dir / f"{stem}_indices.png"
    fig.savefig(index_path, dpi=150, bbox_inches="tight")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    for r in reports:
        ax.plot([r.depth] * len(r.u_range), r.u_range, "k.", alpha=0.6)
    ax.plot(depths, [max(r.u_range) for r in reports], "r-", label="max |U|")
    ax.set_xlabel("depth")
    ax.set_ylabel("|U(a)|, a != 1")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xticks(depths)
    ax.legend()
    ax.grid(True, alpha=0.3)
    u_path = out_dir / f"{stem}_u_values.png"
    fig.savefig(u_path, dpi=150, bbox_inches="tight")
    plt.close(fig)

    return [index_path, u_path]
