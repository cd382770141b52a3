"""Clock-rate and error-rate panels (fig14, fig15).

The CSV mixes two row families told apart by the ``panel`` column:
``gamma`` rows sweep the local gate error at a fixed interface (the
``tau_over_tlc`` field is empty there), ``tctl`` rows sweep the
interface time ratio at fixed gate error.  They land on separate axes.
"""

import matplotlib.pyplot as plt
import numpy as np

from .loading import SchemaError


def fig14(table, spec):
    panel = np.asarray(table["panel"])
    gamma = panel == "gamma"
    tctl = panel == "tctl"
    if not gamma.any() or not tctl.any():
        raise SchemaError("need both 'gamma' and 'tctl' panel rows")

    fig, (ax_g, ax_t) = plt.subplots(1, 2, figsize=(8.6, 3.4))

    for imp in np.unique(table["imperfection"][gamma]):
        sel = gamma & (table["imperfection"] == imp)
        order = np.argsort(table["p_l"][sel])
        ax_g.plot(
            table["p_l"][sel][order],
            table["value"][sel][order],
            marker="o",
            markersize=3.5,
            label=f"p_I = p_M = {imp:g}",
        )
    ax_g.legend(fontsize=8)

    pairs = sorted(
        set(zip(table["imperfection"][tctl], table["p_l"][tctl]))
    )
    for imp, p_l in pairs:
        sel = tctl & (table["imperfection"] == imp) & (table["p_l"] == p_l)
        order = np.argsort(table["tau_over_tlc"][sel])
        ax_t.plot(
            table["tau_over_tlc"][sel][order],
            table["value"][sel][order],
            label=f"p_I={imp:g}, p_L={p_l:g}",
        )
    ax_t.legend(fontsize=7)

    for ax, ax_spec in zip((ax_g, ax_t), spec.axes):
        ax.set_xlabel(ax_spec.xlabel)
        ax.set_ylabel(ax_spec.ylabel)
        ax.set_xscale(ax_spec.xscale)
        ax.set_yscale(ax_spec.yscale)
        ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    return fig


# same layout, dephasing-model data
fig15 = fig14
