"""Optional PNG renderings of the exported data (Agg backend, no display)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def amplitude_map(path, grid, intensity, title=""):
    fig, ax = plt.subplots(figsize=(4.6, 4))
    im = ax.imshow(intensity.T, origin="lower", cmap="viridis",
                   extent=[grid.d_min, grid.d_max, grid.d_min, grid.d_max])
    fig.colorbar(im, ax=ax, label=r"$|\gamma C|^2$")
    ax.set_xlabel(r"$\Delta_p/\gamma$")
    ax.set_ylabel(r"$\Delta_q/\gamma$")
    ax.set_title(title)
    _save(fig, path)


def profile(path, x, y, xlabel, ylabel, title=""):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(x, y, lw=1.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _save(fig, path)


def scan_map(path, e_values, x, data, title=""):
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.pcolormesh(np.asarray(x), np.asarray(e_values), data, shading="auto", cmap="magma")
    fig.colorbar(im, ax=ax, label=r"$|\phi(x)|^2$")
    ax.set_xlabel(r"$\gamma x$")
    ax.set_ylabel(r"$E/\gamma$")
    ax.set_title(title)
    _save(fig, path)
