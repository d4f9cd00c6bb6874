"""Hasse diagram figures rendered with matplotlib's Agg backend."""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .poset import FinitePoset, _longest_below, rank_function  # noqa: E402


def hasse_layout(p: FinitePoset, ranks: Sequence[int] | None = None) -> np.ndarray:
    """``(size, 2)`` coordinates: y is the rank (or chain depth), x spreads each layer.

    Within a layer elements are ordered by the mean x of their lower covers,
    ties broken by index, which removes most crossings in these posets.
    """
    if ranks is None:
        ranks = rank_function(p)
    if ranks is None:
        ranks = [int(d) for d in _longest_below(p)]
    pos = np.zeros((p.size, 2))
    layers: dict[int, list[int]] = {}
    for i, r in enumerate(ranks):
        layers.setdefault(int(r), []).append(i)
    for r in sorted(layers):
        members = layers[r]
        bary = []
        for i in members:
            below = p.lower_covers[i]
            bary.append(float(np.mean(pos[list(below), 0])) if below else 0.0)
        order = sorted(range(len(members)), key=lambda j: (bary[j], members[j]))
        width = len(members)
        for slot, j in enumerate(order):
            pos[members[j]] = (slot - (width - 1) / 2, r)
    return pos


def draw_hasse(p: FinitePoset, ax=None, ranks: Sequence[int] | None = None,
               title: str | None = None, with_labels: bool | None = None):
    """Draw the cover graph of ``p`` on ``ax`` (a new figure when omitted)."""
    if ax is None:
        _, ax = plt.subplots(figsize=(max(4.0, min(40.0, 0.5 * p.size ** 0.75 + 3)), 5))
    pos = hasse_layout(p, ranks)
    if with_labels is None:
        with_labels = p.size <= 60
    for a, b in p.cover_pairs():
        ax.plot(pos[[a, b], 0], pos[[a, b], 1], color="0.55", lw=0.7, zorder=1)
    ax.scatter(pos[:, 0], pos[:, 1], s=18 if p.size > 60 else 36, color="C0", zorder=2)
    if with_labels:
        for i in range(p.size):
            ax.annotate(p.label(i), pos[i], xytext=(4, 3), textcoords="offset points", fontsize=7)
    ax.set_ylabel("rank")
    ax.set_yticks(sorted({int(y) for y in pos[:, 1]}))
    ax.set_xticks([])
    for side in ("top", "right", "bottom"):
        ax.spines[side].set_visible(False)
    if title:
        ax.set_title(title, fontsize=10)
    return ax


def save_hasse(p: FinitePoset, path: str, ranks: Sequence[int] | None = None,
               title: str | None = None, dpi: int = 120) -> None:
    ax = draw_hasse(p, ranks=ranks, title=title)
    fig = ax.figure
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    plt.close(fig)
