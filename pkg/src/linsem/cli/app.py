"""CLI App for linsem."""
from pathlib import Path
from typing import Annotated, Optional

import typer

from linsem.cli.cli_options import QuietOpt, ThreadsOpt, VerboseOpt
from linsem.cli.utils import GlobalOptions, setup_root_logger

from .cluster import cluster
from .components import fit_components, prune
from .decorr_eval import decorr_eval
from .direction import fit_direction, manipulate
from .jacobian import jacobian
from .report import report
from .run_pipeline import pipeline, sweep
from .synth import synth, synth_observe

command_impls = [
    synth,
    synth_observe,
    decorr_eval,
    fit_direction,
    manipulate,
    jacobian,
    fit_components,
    prune,
    cluster,
    sweep,
    pipeline,
    report,
]

app = typer.Typer(no_args_is_help=True)


@app.callback()
def main(
    ctx: typer.Context,
    seed: Annotated[
        Optional[int],
        typer.Option("--seed", help="The default seed of every command.", min=0),
    ] = None,
    out: Annotated[
        Optional[Path],
        typer.Option("--out", "-o", help="The default output directory.", file_okay=False),
    ] = None,
    threads: ThreadsOpt = 1,
    quiet: QuietOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Latent decorrelation, semantic directions, localized components and Ward clustering."""
    setup_root_logger(verbose, quiet)
    ctx.obj = GlobalOptions(seed=seed, out=out, threads=threads)


for command_impl in command_impls:
    if isinstance(command_impl, typer.Typer):
        app.add_typer(command_impl, name=command_impl.info.name)
    else:
        app.command()(command_impl)


__all__ = ["app"]
