"""Report figures, written straight to files (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .geometry import ALL_COMPONENTS, component_box  # noqa: E402

_COLORS = {
    "face": "#4c72b0", "left_eye": "#dd8452", "right_eye": "#55a868",
    "nose": "#c44e52", "mouth_chin": "#8172b3", "forehead_eyebrow": "#937860",
}


def plot_report(report, path, title=None):
    """Horizontal bar chart of recognition rate per report row."""
    rows = [r for r in report.rows if r.rate is not None]
    fig, ax = plt.subplots(figsize=(6.4, 0.45 * max(len(rows), 2) + 1.2))
    labels = [r.condition for r in rows]
    rates = [r.rate for r in rows]
    colors = [_COLORS.get(c.split(":", 1)[-1], "#777777") for c in labels]
    ax.barh(range(len(rows)), rates, color=colors)
    for i, r in enumerate(rows):
        ax.text(min(r.rate + 1, 92), i, f"{r.rate:.1f}% ({r.correct}/{r.probes})", va="center", fontsize=8)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(labels, fontsize=9)
    ax.invert_yaxis()
    ax.set_xlim(0, 100)
    ax.set_xlabel("rank-1 recognition rate (%)")
    ax.set_title(title or f"{report.method}, occlusion: {report.occlusion}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_components(img, ls, path, margins=None, kinds=ALL_COMPONENTS):
    """Draw the image with its landmarks and component boxes."""
    fig, ax = plt.subplots(figsize=(4, 4 * img.shape[0] / img.shape[1]))
    ax.imshow(img, cmap="gray", vmin=0, vmax=255)
    xs = [lm.px for lm in ls.points.values()]
    ys = [lm.py for lm in ls.points.values()]
    ax.scatter(xs, ys, s=6, c="yellow")
    for kind in kinds:
        box = component_box(ls, kind) if margins is None else component_box(ls, kind, margins)
        ax.add_patch(Rectangle((box.x0, box.p_y), box.l, box.b, fill=False, lw=1.2,
                               edgecolor=_COLORS[kind.value], label=kind.value))
    ax.set_axis_off()
    ax.legend(loc="lower right", fontsize=6, framealpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
