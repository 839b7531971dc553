"""Figures written next to the text reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .questionnaire import ROLES  # noqa: E402

# fixed metadata keeps repeated renders byte-identical
_PNG_METADATA = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def residual_plot(resid, path, title="Standardized residuals"):
    """Residuals against observation index with +-2 and +-3 guide lines."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.scatter(resid.index, resid.values, s=8, color="k")
    ax.axhline(0.0, color="0.3", lw=1)
    for level, style in ((2, "--"), (3, ":")):
        ax.axhline(level, color="0.5", lw=0.8, ls=style)
        ax.axhline(-level, color="0.5", lw=0.8, ls=style)
    lim = max(3.5, float(np.max(np.abs(resid.values))) * 1.05)
    ax.set_ylim(-lim, lim)
    ax.set_xlabel("Observation index")
    ax.set_ylabel("Residual")
    ax.set_title(title)
    return _save(fig, path)


def goal_means_plot(score, path, title=None):
    """Bar chart of the five goal means; unselected goals are drawn hollow."""
    means = score.means.by_goal()
    selected = {1: score.selector.sb, 2: score.selector.co, 3: score.selector.re,
                4: score.selector.cp, 5: 0}
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = np.arange(1, 6)
    for g, x in zip(means, xs):
        filled = bool(selected[g])
        ax.bar(x, float(means[g]), color="0.35" if filled else "white", edgecolor="k")
    ax.set_xticks(xs)
    ax.set_xticklabels([ROLES[g].replace(" ", "\n") for g in means], fontsize=8)
    ax.set_ylim(0, 105)
    ax.set_ylabel("Goal mean")
    ax.set_title(title or f"Quality {score.value:.9f}")
    return _save(fig, path)
