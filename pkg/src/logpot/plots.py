"""Figure rendering for the CLI report paths.

All figures go through Agg with pinned rc settings and fixed PNG metadata so
that two identical runs produce byte-identical image files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 4,
}

# fixed text chunk instead of the version-carrying matplotlib default
_PNG_METADATA = {"Software": "logpot"}


def save_figure(fig, path) -> None:
    fig.savefig(path, format="png", metadata=_PNG_METADATA)
    plt.close(fig)


def scatter_figure(x, y, values, title: str, value_label: str):
    """Colored point cloud over the plane; works for any grid shape."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        sc = ax.scatter(x, y, c=values, s=14, cmap="viridis")
        fig.colorbar(sc, ax=ax, label=value_label)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
        ax.set_title(title)
        fig.tight_layout()
    return fig


def compare_figure(reference, candidate, title: str, xlabel: str, ylabel: str):
    """Candidate against reference values with the identity line."""
    reference = np.asarray(reference, dtype=float)
    candidate = np.asarray(candidate, dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        lo = float(min(reference.min(), candidate.min()))
        hi = float(max(reference.max(), candidate.max()))
        pad = 0.05 * (hi - lo if hi > lo else 1.0)
        ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], "k--", lw=1,
                label="exact agreement")
        ax.plot(reference, candidate, "o")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend()
        fig.tight_layout()
    return fig


def fit_figure(x, y, slope: float, intercept: float, title: str,
               xlabel: str, ylabel: str, extra_slope=None, extra_label: str = ""):
    """Data points with the fitted line and an optional reference slope."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(x, y, "o", label="samples")
        xs = np.linspace(x.min(), x.max(), 64)
        ax.plot(xs, slope * xs + intercept, "-",
                label=f"fit, slope {slope:.4f}")
        if extra_slope is not None:
            anchor = y[-1] - extra_slope * x[-1]
            ax.plot(xs, extra_slope * xs + anchor, ":",
                    label=extra_label or f"reference slope {extra_slope:.3f}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend()
        fig.tight_layout()
    return fig
