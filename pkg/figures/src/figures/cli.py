"""``render``: one regsim CSV in, one image out."""

import click

from .loading import SchemaError
from .render import SUPPORTED, make_spec, render


@click.command()
@click.option("--figure", "figure", required=True,
              type=click.Choice(SUPPORTED),
              help="Figure id; selects the CSV schema and the layout.")
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV file produced by the regsim CLI.")
@click.option("--out", "out_path", required=True,
              help="Output image path (.png or .svg).")
def main(figure, in_path, out_path):
    """Render a regsim CSV report as a plot."""
    try:
        render(make_spec(figure, in_path, out_path))
    except (SchemaError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc


if __name__ == "__main__":
    main(prog_name="render")
