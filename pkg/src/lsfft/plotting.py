"""Figures rendered next to the CLI's CSV output (optional ``--plot``)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .ratemap import LABELS, TIE, UNDEF  # noqa: E402


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_solve(report, path) -> None:
    """Indicators against the iteration number, log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    k = report.column("k")
    for name, label in (("delta1", "equilibrium"), ("delta2", "iterate difference"),
                        ("coef_indicator", "|d_k t^k|")):
        y = report.column(name)
        ax.semilogy(k, np.where(y > 0, y, np.nan), label=label)
    ax.axhline(report.tol, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("iteration k")
    ax.set_ylabel("indicator")
    ax.set_title(f"{report.params.kind.value}, z = {report.params.z:g}")
    ax.legend()
    _save(fig, path)


def plot_series(numerical, path, analytic=None) -> None:
    """|d_k| of the extracted series, with the exact series when available."""
    fig, ax = plt.subplots(figsize=(6, 4))
    k = np.arange(len(numerical.d))
    ax.semilogy(k, np.abs(numerical.d_array()), "o-", ms=3, label=f"grid {numerical.grid_n}")
    if analytic is not None:
        ax.semilogy(k, np.abs(analytic.d_array()), "k--", label="exact")
    ax.set_xlabel("k")
    ax.set_ylabel("|d_k|")
    ax.legend()
    _save(fig, path)


def plot_ratemap(labels, beta_axis, z_axis, path) -> None:
    """Fastest scheme per (beta, z) cell."""
    codes = {lab: i for i, lab in enumerate(LABELS + (TIE, UNDEF))}
    grid = np.vectorize(codes.get)(labels).astype(float)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    cmap = matplotlib.colors.ListedColormap(["tab:blue", "tab:orange", "tab:green", "white", "lightgrey"])
    ax.pcolormesh(z_axis, beta_axis, grid, cmap=cmap, vmin=-0.5, vmax=4.5, shading="nearest")
    handles = [matplotlib.patches.Patch(color=cmap(i), label=lab) for lab, i in codes.items()]
    ax.legend(handles=handles, loc="upper right", fontsize="small")
    ax.set_xlabel("z")
    ax.set_ylabel("beta")
    _save(fig, path)
