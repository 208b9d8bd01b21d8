"""Static figures for the report command.

Each function takes plain arrays (the same numbers that go to CSV) and
writes one PNG.  The non-interactive Agg backend is selected on import.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 3.8),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "axes.spines.top": False,
    "axes.spines.right": False,
}

MARKS = (14.134725, 21.022040, 25.010858)


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def histogram_figure(path, edges, counts, overlay=None, marks=MARKS, title=None):
    """Bar histogram of zero differences, optionally with a predicted-count curve."""
    edges = np.asarray(edges, dtype=float)
    centers = 0.5 * (edges[1:] + edges[:-1])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge", color="#9ecae1", edgecolor="none",
               label="zero differences")
        if overlay is not None:
            ax.plot(centers, overlay, color="#d62728", label="prediction")
        for m in marks:
            ax.axvline(m, color="0.4", lw=0.6, ls=":")
        ax.set_xlim(edges[0], edges[-1])
        ax.set_xlabel(r"$\gamma - \gamma'$")
        ax.set_ylabel("count per bin")
        if title:
            ax.set_title(title)
        ax.legend(loc="lower right")
        return _save(fig, path)


def comparison_figure(path, alpha, lhs, rhs, title=None):
    """Measured pair sum against its prediction, with the difference on a second panel."""
    alpha = np.asarray(alpha, dtype=float)
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    with plt.rc_context(STYLE):
        fig, (top, bot) = plt.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": (3, 1.3)})
        top.plot(alpha, lhs, "o-", label="measured", ms=3)
        top.plot(alpha, rhs, "s--", label="predicted", ms=3)
        top.set_ylabel("value")
        top.legend()
        if title:
            top.set_title(title)
        bot.axhline(0, color="0.5", lw=0.6)
        bot.plot(alpha, lhs - rhs, "o-", color="#2ca02c", ms=3)
        bot.set_xlabel(r"$\alpha$")
        bot.set_ylabel("difference")
        return _save(fig, path)


def curves_figure(path, x, curves: dict, xlabel, ylabel, title=None, marks=()):
    """Several named curves over a shared x grid."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name, y in curves.items():
            ax.plot(x, y, label=name)
        for m in marks:
            ax.axvline(m, color="0.4", lw=0.6, ls=":")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(curves) > 1:
            ax.legend()
        return _save(fig, path)
