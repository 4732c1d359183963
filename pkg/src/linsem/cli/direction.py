"""CLI commands fitting manipulation directions and applying them."""
from pathlib import Path
from typing import Annotated, List, Optional

import numpy as np
import typer

from linsem.cli.cli_options import OutFileOpt, OutOpt, RidgeOpt, SeedOpt, timed
from linsem.cli.utils import cli_logger, global_options, handle_cli_errors
from linsem.core import LatentBatch, make_rng, sample_gaussian
from linsem.core.errors import ShapeMismatchError
from linsem.core.matrix_io import read_matrix, write_matrix
from linsem.direction import (
    DifferenceSet,
    DirectionVector,
    attach_sigma,
    fit_direction as fit_direction_vector,
    manipulate as manipulate_codes,
    traverse,
)
from linsem.pipeline import RunManifest

TRAVERSAL_SCALES = [float(s) for s in range(-4, 5)]


@timed
def fit_direction(
    ctx: typer.Context,
    delta_w: Annotated[
        Path,
        typer.Option("--delta-w", "--dw", exists=True, dir_okay=False, help="The N×d ΔW CSV."),
    ],
    delta_y: Annotated[
        Path,
        typer.Option("--delta-y", "--dy", exists=True, dir_okay=False, help="The N×1 ΔY CSV."),
    ],
    ridge: RidgeOpt = 0.0,
    reference: Annotated[
        Optional[Path],
        typer.Option(
            exists=True,
            dir_okay=False,
            help="An N×d latent batch to measure σ_w on. "
            "A standard normal batch is drawn if omitted.",
        ),
    ] = None,
    reference_samples: Annotated[
        int, typer.Option(help="Rows of the drawn reference batch.", min=2)
    ] = 4096,
    name: Annotated[
        str, typer.Option(help="The direction's file name when --out is a directory.")
    ] = "direction",
    out: OutFileOpt = None,
    seed: SeedOpt = None,
) -> None:
    """Regress a unit manipulation direction from latent and semantic differences."""
    options = global_options(ctx)
    with handle_cli_errors():
        dw, _ = read_matrix(delta_w)
        dy, _ = read_matrix(delta_y)
        if dy.shape[1] != 1:
            raise ShapeMismatchError(f"{delta_y} must have one column, got {dy.shape[1]}")
        direction = fit_direction_vector(DifferenceSet(delta_w=dw, delta_y=dy[:, 0]), ridge)

        run_seed = options.resolve_seed(seed)
        if reference is not None:
            batch = LatentBatch.from_array(read_matrix(reference)[0])
        else:
            batch = sample_gaussian(reference_samples, direction.dim, make_rng(run_seed))
        direction = attach_sigma(direction, batch)
        cli_logger.debug(f"σ_w = {direction.sigma_w}")

        out_file, out_dir = options.resolve_out_file(out, f"{name}.json")
        direction.save(out_file)
        RunManifest.for_inputs(
            command="fit-direction",
            parameters={"ridge": ridge, "reference_samples": reference_samples},
            inputs=[delta_w, delta_y] + ([reference] if reference else []),
            seed=run_seed,
        ).write(out_dir)

    typer.echo(
        f"Direction written to {out_file.absolute()} "
        f"(residual rms {direction.residual_rms:.4g}, σ_w {direction.sigma_w:.4g})"
    )


@timed
def manipulate(
    ctx: typer.Context,
    direction: Annotated[
        Path,
        typer.Option("--direction", "--dir", exists=True, dir_okay=False, help="A direction JSON."),
    ],
    latents: Annotated[
        Path,
        typer.Option("--latents", "--w", exists=True, dir_okay=False, help="An N×d latent CSV."),
    ],
    scale: Annotated[
        float, typer.Option("--scale", "-s", help="The target projection in units of σ_w.")
    ] = 0.0,
    scan: Annotated[
        bool,
        typer.Option(
            "--traverse",
            is_flag=True,
            help="Move one latent code through the scales -4..4 instead.",
        ),
    ] = False,
    scales: Annotated[
        Optional[List[float]],
        typer.Option("--scales", help="Scales of --traverse."),
    ] = None,
    out: OutOpt = None,
) -> None:
    """Push latent codes along a direction, writing manipulated.csv."""
    options = global_options(ctx)
    with handle_cli_errors():
        vector = DirectionVector.load(direction)
        codes, _ = read_matrix(latents)
        if scan:
            if codes.shape[0] != 1:
                raise ShapeMismatchError(
                    f"--traverse takes exactly one latent code, got {codes.shape[0]}"
                )
            used = scales or TRAVERSAL_SCALES
            result = traverse(codes[0], vector, used)
        else:
            used = [scale]
            result = manipulate_codes(codes, vector, scale)

        out_dir = options.resolve_out(out)
        write_matrix(out_dir / "manipulated.csv", np.atleast_2d(result), "latent_batch")
        RunManifest.for_inputs(
            command="manipulate",
            parameters={"scales": used, "traverse": scan},
            inputs=[direction, latents],
        ).write(out_dir)

    typer.echo(f"Wrote {len(result)} manipulated code(s) to {out_dir.absolute()}")
