"""CLI command regressing the stacked canonical Jacobian."""
from pathlib import Path
from typing import Annotated

import typer

from linsem.cli.cli_options import OutFileOpt, RidgeOpt, TargetShapeOpt, timed
from linsem.cli.utils import global_options, handle_cli_errors, parse_shape
from linsem.core.matrix_io import read_matrix, write_matrix
from linsem.jacobian import build_jacobian
from linsem.pipeline import RunManifest


@timed
def jacobian(
    ctx: typer.Context,
    delta_w: Annotated[
        Path,
        typer.Option("--delta-w", "--dw", exists=True, dir_okay=False, help="The N×d ΔW CSV."),
    ],
    delta_targets: Annotated[
        Path,
        typer.Option(
            "--delta-targets",
            "--targets",
            exists=True,
            dir_okay=False,
            help="The N×S target differences CSV.",
        ),
    ],
    target_shape: TargetShapeOpt = None,
    ridge: RidgeOpt = 0.0,
    out: OutFileOpt = None,
) -> None:
    """Regress every target dimension on the latent differences, writing J.csv."""
    options = global_options(ctx)
    with handle_cli_errors():
        dw, dw_manifest = read_matrix(delta_w)
        dt, dt_manifest = read_matrix(delta_targets)
        shape = parse_shape(target_shape) or list(dt_manifest.target_shape or [])
        result = build_jacobian(
            dw, dt, target_shape=shape, ridge=ridge, workers=options.threads
        )

        out_file, out_dir = options.resolve_out_file(out, "J.csv")
        write_matrix(
            out_file, result.data, "jacobian", dw_manifest.seed, result.target_shape
        )
        RunManifest.for_inputs(
            command="jacobian",
            parameters={"ridge": ridge, "target_shape": result.target_shape},
            inputs=[delta_w, delta_targets],
            seed=dw_manifest.seed,
        ).write(out_dir)

    typer.echo(
        f"Wrote the {result.n_targets}×{result.dim} Jacobian to "
        f"{out_file.absolute()}"
    )
