"""CLI command rendering a pipeline report."""
from pathlib import Path
from typing import Annotated

import typer

from linsem.cli.cli_options import JsonOpt, timed
from linsem.cli.rich_output import rich_print_report
from linsem.cli.utils import handle_cli_errors
from linsem.pipeline import Report


@timed
def report(
    path: Annotated[
        Path, typer.Argument(exists=True, help="A report.json or the run directory holding it.")
    ],
    as_json: JsonOpt = False,
) -> None:
    """Render the recovery criteria, solver trace and cluster labels of a run."""
    with handle_cli_errors():
        loaded = Report.load(path)

    if as_json:
        typer.echo(loaded.to_json(indent=2))  # type: ignore
    else:
        rich_print_report(loaded)
