"""Figure dispatch: id to schema, axes, and renderer.

Rendering is pure with respect to the CSV: a fixed style sheet, no
timestamps (SVG dates stripped, hashed SVG ids salted with a constant),
so the same input file produces the same image bytes.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import budgets, contours, curves, timing
from .loading import SCHEMAS, SchemaError, load_table

FORMATS = (".png", ".svg")

STYLE = {
    "svg.hashsalt": "figures",
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.titlesize": 9,
}


class AxisSpec(NamedTuple):
    xlabel: str
    ylabel: str
    xscale: str = "linear"
    yscale: str = "linear"


@dataclass(frozen=True)
class PlotSpec:
    """Everything one render needs: source, destination, and layout."""

    figure: str
    csv_path: str
    out_path: str
    axes: tuple
    levels: tuple | None = None


class _Entry(NamedTuple):
    draw: Callable
    axes: tuple


_REGISTRY = {
    "fig6": _Entry(
        curves.fig6,
        (AxisSpec("successful pumping steps", "fidelity"),),
    ),
    "fig9": _Entry(
        budgets.fig9,
        (AxisSpec("attempt budget N_tot", "failure probability",
                  yscale="log"),),
    ),
    "fig10": _Entry(
        budgets.fig10,
        (AxisSpec("attempt budget N_tot", "budgeted error",
                  yscale="log"),),
    ),
    "fig7": _Entry(
        contours.fig7,
        (AxisSpec("bit-pumping steps n_b", "phase-pumping steps n_p"),),
    ),
    "fig11": _Entry(
        contours.fig11,
        (AxisSpec("local gate error p_L", "raw pair fidelity F",
                  xscale="log"),),
    ),
    "fig13": _Entry(
        contours.fig13,
        (AxisSpec("local gate error p_L", "raw pair fidelity F",
                  xscale="log"),),
    ),
    "fig16": _Entry(
        contours.fig16,
        (AxisSpec("local gate error p_L", "raw pair infidelity 1-F",
                  xscale="log"),),
    ),
    "fig14": _Entry(
        timing.fig14,
        (
            AxisSpec("local gate error p_L",
                     "error per nonlocal gate gamma",
                     xscale="log", yscale="log"),
            AxisSpec("interface time ratio tau / t_L",
                     "clock cycle t_C / t_L",
                     xscale="log", yscale="log"),
        ),
    ),
}
_REGISTRY["fig15"] = _REGISTRY["fig14"]._replace(draw=timing.fig15)

SUPPORTED = tuple(sorted(_REGISTRY))

assert set(SUPPORTED) == set(SCHEMAS)


def make_spec(figure, csv_path, out_path, levels=None):
    if figure not in _REGISTRY:
        raise SchemaError(f"unknown figure id {figure!r}")
    return PlotSpec(figure, csv_path, out_path, _REGISTRY[figure].axes,
                    levels)


def render(spec):
    """Render ``spec`` to its output path.

    The CSV is fully loaded and validated before any drawing, so a
    schema error never leaves a file behind.
    """
    ext = "." + spec.out_path.rsplit(".", 1)[-1].lower()
    if ext not in FORMATS or "." not in spec.out_path:
        raise ValueError(
            f"output must end in one of {FORMATS}, got {spec.out_path!r}"
        )
    table = load_table(spec.csv_path, spec.figure)
    with plt.rc_context(STYLE):
        fig = _REGISTRY[spec.figure].draw(table, spec)
        try:
            if ext == ".svg":
                fig.savefig(spec.out_path, metadata={"Date": None})
            else:
                fig.savefig(spec.out_path)
        finally:
            plt.close(fig)
