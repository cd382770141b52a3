"""Labeled contour maps over parameter grids (fig7, fig11, fig13, fig16).

Columns already stored as log10 keep their values in the contour labels
(a label of -3.5 means 10^-3.5); linear columns are labeled as they are.
Grids with a missing (x, y) combination are rejected by the loader, so
every renderer here sees a full rectangle.
"""

import matplotlib.pyplot as plt
import numpy as np

from .loading import pivot_grid


def _panel(ax, xs, ys, grid, ax_spec, levels, fmt):
    filled = ax.contourf(xs, ys, grid, levels=levels, cmap="viridis")
    lines = ax.contour(
        xs, ys, grid, levels=filled.levels, colors="black", linewidths=0.6
    )
    ax.clabel(lines, fmt=fmt, fontsize=7)
    ax.set_xlabel(ax_spec.xlabel)
    ax.set_ylabel(ax_spec.ylabel)
    ax.set_xscale(ax_spec.xscale)
    ax.set_yscale(ax_spec.yscale)
    return filled


def fig7(table, spec):
    """log10 delivered infidelity over the (n_bit, n_phase) plane."""
    xs, ys, grid = pivot_grid(
        table["n_bit"], table["n_phase"], table["log10_infidelity"]
    )
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    filled = _panel(ax, xs, ys, grid, spec.axes[0], spec.levels, "%.1f")
    ax.set_xticks(xs)
    ax.set_yticks(ys)
    fig.colorbar(filled, ax=ax, label="log10(delivered infidelity)")
    fig.tight_layout()
    return fig


def _model_panels(table, spec, z_key):
    """One contour panel per error model present in the file."""
    models = sorted(set(table["model"]))
    fig, axes = plt.subplots(
        1, len(models), figsize=(4.4 * len(models), 3.6), squeeze=False
    )
    model = np.asarray(table["model"])
    out = []
    for ax, mod in zip(axes[0], models):
        sel = model == mod
        xs, ys, grid = pivot_grid(
            table["p_l"][sel], table[z_key[1]][sel], table[z_key[0]][sel]
        )
        out.append((ax, mod, _panel(ax, xs, ys, grid, spec.axes[0],
                                    spec.levels, z_key[2])))
        ax.set_title(mod)
    return fig, out


def fig11(table, spec):
    """Attempt budgets over the (p_l, f) box, one panel per model.

    Solid labeled contours carry the total-error budget; dashed ones the
    average-infidelity budget, which is the cheaper of the two.
    """
    fig, panels = _model_panels(table, spec, ("ntot_tep", "f", "%d"))
    model = np.asarray(table["model"])
    for ax, mod, _ in panels:
        sel = model == mod
        xs, ys, grid = pivot_grid(
            table["p_l"][sel], table["f"][sel], table["ntot_aif"][sel]
        )
        dashed = ax.contour(
            xs, ys, grid, colors="white", linewidths=0.8, linestyles="--"
        )
        ax.clabel(dashed, fmt="%d", fontsize=7)
    fig.colorbar(panels[-1][2], ax=[p[0] for p in panels], label="N_tot (total error)")
    return fig


def fig13(table, spec):
    """Pipelined over non-pipelined attempt-budget ratio on (p_l, f)."""
    xs, ys, grid = pivot_grid(table["p_l"], table["f"], table["ratio"])
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    filled = _panel(ax, xs, ys, grid, spec.axes[0], spec.levels, "%.1f")
    fig.colorbar(filled, ax=ax, label="N_tot(PS) / N_tot(NPS)")
    fig.tight_layout()
    return fig


def fig16(table, spec):
    """Required memory time over (p_l, 1-F), one panel per model."""
    fig, panels = _model_panels(
        table, spec, ("log10_tmem_over_tl", "one_minus_f", "%.1f")
    )
    fig.colorbar(
        panels[-1][2], ax=[p[0] for p in panels], label="log10(t_mem / t_L)"
    )
    return fig
