"""Plot renderer for regsim CSV reports."""

from .loading import SCHEMAS, SchemaError, load_table
from .render import SUPPORTED, AxisSpec, PlotSpec, make_spec, render

__all__ = [
    "AxisSpec",
    "PlotSpec",
    "SCHEMAS",
    "SUPPORTED",
    "SchemaError",
    "load_table",
    "make_spec",
    "render",
]
