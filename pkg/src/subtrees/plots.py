"""Matplotlib figures for batch reports (written to files, never shown)."""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .stats import median

plt.rcParams.update({
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
})


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)
    return path


def tree_figure(t, path, ax_title=None):
    """Draw a torus/grid tree with matplotlib; wrap edges split at the seam."""
    from .svg import _segments
    segs, W, H = _segments(t)
    fig, ax = plt.subplots(figsize=(5, 5 * H / max(W, 1)))
    for (x1, y1, x2, y2) in segs:
        ax.plot([x1, x2], [y1, y2], color="#1f3a5f", lw=0.8)
    if t.rooted:
        x, y = t.host.coords(t.root)
        ax.plot([x], [y], "o", color="#c0392b", ms=3)
    ax.set_xlim(-1, W)
    ax.set_ylim(-1, H)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    if ax_title:
        ax.set_title(ax_title)
    return _save(fig, path)


def degree_figure(q_mean, q_se, path, reference=None):
    """Mean degree proportions with 2-se bars, optionally against reference values."""
    q_mean = np.asarray(q_mean)
    k = np.arange(1, len(q_mean) + 1)
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.bar(k, q_mean, yerr=2 * np.asarray(q_se), color="#8fa9c8", capsize=3, label="simulated")
    if reference is not None:
        ax.plot(k, reference, "k_", ms=18, mew=2, label="reference")
        ax.legend(frameon=False)
    ax.set_xticks(k)
    ax.set_xlabel("degree")
    ax.set_ylabel("proportion")
    return _save(fig, path)


def histogram_figure(values, path, xlabel, bins=40):
    values = np.asarray(values)
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.hist(values, bins=bins, color="#8fa9c8", edgecolor="white")
    ax.axvline(values.mean(), color="k", lw=1, label="mean %.2f" % values.mean())
    ax.axvline(median(values), color="k", lw=1, ls="--", label="median %g" % median(values))
    ax.set_xlabel(xlabel)
    ax.legend(frameon=False)
    return _save(fig, path)


def profile_figure(samples, path, gamma, xlabel="Y / n^g"):
    """Empirical distribution functions of Y_n / n^gamma for several sizes n."""
    fig, ax = plt.subplots(figsize=(4, 3))
    for n in sorted(samples):
        y = np.sort(np.asarray(samples[n], float)) / n ** gamma
        ax.step(y, np.arange(1, len(y) + 1) / len(y), where="post", lw=1, label="n=%d" % n)
    ax.set_xlabel(xlabel.replace("g", "%.3g" % gamma, 1) if "n^g" in xlabel else xlabel)
    ax.set_ylabel("empirical cdf")
    ax.legend(frameon=False)
    return _save(fig, path)
