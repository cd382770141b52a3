"""Pumping-trajectory curves (fig6)."""

import matplotlib.pyplot as plt
import numpy as np


def fig6(table, spec):
    """Fidelity against successful pumping steps, one curve per level."""
    ax_spec = spec.axes[0]
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    for level in np.unique(table["level"]):
        sel = table["level"] == level
        order = np.argsort(table["step"][sel])
        ax.plot(
            table["step"][sel][order],
            table["fidelity"][sel][order],
            marker="o",
            markersize=4,
            label=f"level {level}",
        )
    ax.set_xlabel(ax_spec.xlabel)
    ax.set_ylabel(ax_spec.ylabel)
    ax.set_xscale(ax_spec.xscale)
    ax.set_yscale(ax_spec.yscale)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig
