"""CLI commands creating planted worlds and observing them."""
from dataclasses import asdict, replace
from pathlib import Path
from typing import Annotated, Optional

import typer

from linsem.cli.cli_options import (
    DirArg,
    OutOpt,
    PerturbationOpt,
    SeedOpt,
    StrategyOpt,
    timed,
)
from linsem.cli.utils import cli_logger, global_options, handle_cli_errors, load_record
from linsem.core import make_rng
from linsem.core.matrix_io import write_matrix
from linsem.oracle import (
    OracleSpec,
    PairStrategy,
    load_world,
    make_world,
    sample_canonical_differences,
    sample_difference_set,
    save_world,
)
from linsem.oracle.oracle_def import WORLD_RECORD
from linsem.pipeline import RunManifest


@timed
def synth(
    ctx: typer.Context,
    spec: Annotated[
        Optional[Path],
        typer.Option(
            exists=True,
            dir_okay=False,
            help="A JSON or YAML world spec. Defaults apply if omitted.",
        ),
    ] = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
) -> None:
    """Plant a linear generative world and write its ground truth."""
    options = global_options(ctx)
    with handle_cli_errors():
        oracle_spec = load_record(OracleSpec, spec) if spec else OracleSpec()
        if (seed := seed if seed is not None else options.seed) is not None:
            oracle_spec = replace(oracle_spec, seed=seed)
        cli_logger.debug(f"World spec: {oracle_spec}")

        out_dir = options.resolve_out(out)
        world = make_world(oracle_spec)
        save_world(world, out_dir)
        RunManifest.for_inputs(
            command="synth",
            parameters=asdict(oracle_spec),
            inputs=[spec] if spec else [],
            seed=oracle_spec.seed,
        ).write(out_dir)

    typer.echo(
        f"Planted {oracle_spec.p_true} components over d={oracle_spec.d}, "
        f"S={oracle_spec.s} at {out_dir.absolute()}"
    )


@timed
def synth_observe(
    ctx: typer.Context,
    world: DirArg,
    n: Annotated[int, typer.Option("--n", "-n", help="Number of pairs.", min=1)] = 4096,
    semantic: Annotated[
        Optional[str],
        typer.Option(
            help="Observe one named semantic. Canonical targets are observed if omitted."
        ),
    ] = None,
    strategy: StrategyOpt = PairStrategy.INDEPENDENT,
    perturbation: PerturbationOpt = 0.1,
    out: OutOpt = None,
    seed: SeedOpt = None,
) -> None:
    """Draw noisy difference observations from a planted world.

    A named semantic gives delta_w.csv and delta_y.csv for fit-direction; canonical
    targets give delta_w.csv and delta_targets.csv for jacobian.
    """
    options = global_options(ctx)
    with handle_cli_errors():
        planted = load_world(world)
        run_seed = options.resolve_seed(seed)
        rng = make_rng(run_seed)
        out_dir = options.resolve_out(out)

        if semantic is not None:
            diffs = sample_difference_set(
                planted, semantic, n, rng, strategy, perturbation
            )
            write_matrix(out_dir / "delta_w.csv", diffs.delta_w, "delta_w", run_seed)
            write_matrix(out_dir / "delta_y.csv", diffs.delta_y, "delta_y", run_seed)
        else:
            delta_w, delta_targets = sample_canonical_differences(
                planted, n, rng, strategy, perturbation
            )
            write_matrix(out_dir / "delta_w.csv", delta_w, "delta_w", run_seed)
            write_matrix(
                out_dir / "delta_targets.csv",
                delta_targets,
                "delta_targets",
                run_seed,
                planted.target_shape,
            )

        RunManifest.for_inputs(
            command="synth-observe",
            parameters={
                "n": n,
                "semantic": semantic,
                "strategy": strategy.value,
                "perturbation": perturbation,
            },
            inputs=[world / WORLD_RECORD, world / "u_star.csv", world / "v_star.csv"],
            seed=run_seed,
        ).write(out_dir)

    typer.echo(
        f"Observed {n} pairs of {semantic or 'canonical targets'} at {out_dir.absolute()}"
    )
