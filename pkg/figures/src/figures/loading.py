"""Schema-checked loading of regsim CSV reports.

The renderer consumes only what the regsim CLI documents as its public
CSV surface: ``#``-prefixed provenance comments, one header row, then
comma-separated, '.'-decimal, LF-terminated data rows.  The header must
match the per-figure schema exactly; anything else is a hard error, not
a best-effort plot.
"""

import csv

import numpy as np

# column kinds: i = integer, f = float, f? = float or empty, s = string
SCHEMAS = {
    "fig6": (("level", "i"), ("step", "i"), ("fidelity", "f")),
    "fig7": (("n_bit", "i"), ("n_phase", "i"), ("log10_infidelity", "f")),
    "fig9": (
        ("n_bit", "i"),
        ("n_phase", "i"),
        ("n_tot", "i"),
        ("fail_prob", "f"),
    ),
    "fig10": (
        ("model", "s"),
        ("metric", "s"),
        ("p_l", "f"),
        ("n_tot", "i"),
        ("value", "f"),
    ),
    "fig11": (
        ("model", "s"),
        ("p_l", "f"),
        ("f", "f"),
        ("log10_quality", "f"),
        ("ntot_tep", "i"),
        ("ntot_aif", "i"),
    ),
    "fig13": (
        ("p_l", "f"),
        ("f", "f"),
        ("ntot_ps", "i"),
        ("ntot_nps", "i"),
        ("ratio", "f"),
    ),
    "fig14": (
        ("panel", "s"),
        ("imperfection", "f"),
        ("p_l", "f"),
        ("tau_over_tlc", "f?"),
        ("value", "f"),
    ),
    "fig16": (
        ("model", "s"),
        ("p_l", "f"),
        ("one_minus_f", "f"),
        ("log10_tmem_over_tl", "f"),
        ("log10_gamma", "f"),
    ),
}
SCHEMAS["fig15"] = SCHEMAS["fig14"]


class SchemaError(ValueError):
    """Input CSV does not match the figure's schema."""


def _convert(token, kind, row_num, name):
    try:
        if kind == "i":
            return int(token)
        if kind == "f":
            return float(token)
        if kind == "f?":
            return float(token) if token != "" else np.nan
    except ValueError:
        pass
    raise SchemaError(
        f"row {row_num}: column {name!r} has non-numeric value {token!r}"
    )


def load_table(path, figure):
    """Read a regsim CSV into column arrays, validating against ``figure``.

    Returns a dict mapping column name to a numpy array (string columns
    to a plain list).  Raises :class:`SchemaError` on a header mismatch,
    a ragged or non-numeric row, or a file with no data rows.
    """
    schema = SCHEMAS[figure]
    names = [n for n, _ in schema]
    with open(path, newline="") as fh:
        rows = csv.reader(ln for ln in fh if not ln.startswith("#"))
        header = next(rows, None)
        if header != names:
            raise SchemaError(
                f"header does not match the {figure} schema: "
                f"expected columns {names}, found {header}"
            )
        cols = {n: [] for n in names}
        n_rows = 0
        for i, row in enumerate(rows, start=1):
            if len(row) != len(schema):
                raise SchemaError(
                    f"row {i}: expected {len(schema)} fields, got {len(row)}"
                )
            for (name, kind), token in zip(schema, row):
                if kind == "s":
                    cols[name].append(token)
                else:
                    cols[name].append(_convert(token, kind, i, name))
            n_rows += 1
    if n_rows == 0:
        raise SchemaError("no data rows")
    return {
        n: cols[n] if k == "s" else np.asarray(cols[n])
        for (n, k) in schema
    }


def pivot_grid(x, y, z):
    """Arrange scattered (x, y, z) samples on their rectangular grid.

    Returns (xs, ys, grid) with grid[j, i] = z at (xs[i], ys[j]).  The
    samples must cover the full product of the distinct x and y values;
    a hole means the CSV was truncated or hand-edited, so it is rejected
    rather than interpolated over.
    """
    xs = np.unique(x)
    ys = np.unique(y)
    grid = np.full((ys.size, xs.size), np.nan)
    grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = z
    if np.isnan(grid).any():
        raise SchemaError(
            f"incomplete grid: {np.isnan(grid).sum()} of "
            f"{grid.size} (x, y) cells have no row"
        )
    return xs, ys, grid
