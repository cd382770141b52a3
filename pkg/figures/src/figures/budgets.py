"""Attempt-budget curves on semilog axes (fig9, fig10)."""

import matplotlib.pyplot as plt
import numpy as np


def _axis(spec):
    ax_spec = spec.axes[0]
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    ax.set_xlabel(ax_spec.xlabel)
    ax.set_ylabel(ax_spec.ylabel)
    ax.set_xscale(ax_spec.xscale)
    ax.set_yscale(ax_spec.yscale)
    ax.grid(alpha=0.3, which="both")
    return fig, ax


def fig9(table, spec):
    """Failure probability against the attempt budget, per schedule."""
    fig, ax = _axis(spec)
    pairs = sorted(set(zip(table["n_bit"], table["n_phase"])))
    for n_b, n_p in pairs:
        sel = (table["n_bit"] == n_b) & (table["n_phase"] == n_p)
        order = np.argsort(table["n_tot"][sel])
        ax.plot(
            table["n_tot"][sel][order],
            table["fail_prob"][sel][order],
            label=f"schedule ({n_b}, {n_p})",
        )
    ax.legend()
    fig.tight_layout()
    return fig


def fig10(table, spec):
    """Budgeted error measures against the attempt budget.

    One curve per (model, metric, p_l) triple present in the file; the
    metric name selects the line style so the two budgeting rules stay
    tellable apart across models.
    """
    fig, ax = _axis(spec)
    model = np.asarray(table["model"])
    metric = np.asarray(table["metric"])
    triples = sorted(set(zip(table["model"], table["metric"], table["p_l"])))
    for mod, met, p_l in triples:
        sel = (model == mod) & (metric == met) & (table["p_l"] == p_l)
        order = np.argsort(table["n_tot"][sel])
        ax.plot(
            table["n_tot"][sel][order],
            table["value"][sel][order],
            linestyle="-" if met == "tep" else "--",
            label=f"{mod} {met}, p_L={p_l:g}",
        )
    ax.legend(fontsize=7)
    fig.tight_layout()
    return fig
