"""CLI command evaluating the decorrelation loss of a latent batch."""
from pathlib import Path
from typing import Annotated, Optional

import typer

from linsem.cli.cli_options import JsonOpt, SeedOpt, VarianceTermOpt, timed
from linsem.cli.rich_output import rich_print_decorr
from linsem.cli.utils import cli_logger, global_options, handle_cli_errors
from linsem.core import LatentBatch, make_rng, sample_gaussian
from linsem.core.matrix_io import read_matrix
from linsem.decorr import VarianceTerm, decorr_loss

DEFAULT_SAMPLES = 4096


@timed
def decorr_eval(
    ctx: typer.Context,
    batch: Annotated[
        Optional[Path],
        typer.Option(exists=True, dir_okay=False, help="An N×d latent batch CSV."),
    ] = None,
    samples: Annotated[
        int,
        typer.Option(help="Rows of the standard normal batch drawn without --batch.", min=2),
    ] = DEFAULT_SAMPLES,
    dim: Annotated[
        int, typer.Option(help="Columns of the drawn batch.", min=1)
    ] = 8,
    variance_term: VarianceTermOpt = VarianceTerm.MEAN,
    as_json: JsonOpt = False,
    seed: SeedOpt = None,
) -> None:
    """Evaluate the decorrelation loss of a batch."""
    options = global_options(ctx)
    with handle_cli_errors():
        if batch is not None:
            data, _ = read_matrix(batch)
            latent = LatentBatch.from_array(data)
        else:
            run_seed = options.resolve_seed(seed)
            cli_logger.debug(f"Sampling a {samples}×{dim} batch with seed {run_seed}")
            latent = sample_gaussian(samples, dim, make_rng(run_seed))
        loss = decorr_loss(latent, variance_term)

    if as_json:
        typer.echo(loss.to_json())  # type: ignore
    else:
        rich_print_decorr(loss, latent.n_samples, latent.dim)
