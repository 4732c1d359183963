"""CLI commands running configured pipelines and α/β sweeps."""
from typing import Annotated

import typer

from linsem.cli.cli_options import (
    AlphaListOpt,
    BetaListOpt,
    ConfigOpt,
    OutOpt,
    SeedOpt,
    timed,
)
from linsem.cli.rich_output import rich_print_report, rich_print_sweep
from linsem.cli.utils import (
    INTERNAL_ERROR_EXIT_CODE,
    cli_logger,
    global_options,
    handle_cli_errors,
)
from linsem.pipeline import (
    SweepGrid,
    load_config,
    pipeline_run,
    resolve_config_path,
    run_sweep,
)

DEFAULT_CONFIG = "oracle-e2e.json"


@timed
def pipeline(
    ctx: typer.Context,
    config: ConfigOpt = DEFAULT_CONFIG,
    require_pass: Annotated[
        bool,
        typer.Option(
            "--require-pass",
            is_flag=True,
            help="Exit with 1 when a recovery criterion fails.",
        ),
    ] = False,
    out: OutOpt = None,
    seed: SeedOpt = None,
) -> None:
    """Run every stage of a config in order and write report.json.

    The config is validated in full before anything is written.
    """
    options = global_options(ctx)
    with handle_cli_errors():
        config_path = resolve_config_path(config)
        run_config = load_config(config_path).with_seed(
            seed if seed is not None else options.seed
        )
        cli_logger.debug(f"Running stages {run_config.stages} with seed {run_config.seed}")
        out_dir = options.resolve_out(out)
        report = pipeline_run(
            run_config, out_dir, workers=options.threads, config_path=config_path
        )

    rich_print_report(report)
    typer.echo(f"Report written to {(out_dir / 'report.json').absolute()}")
    if require_pass and not report.passed:
        raise typer.Exit(code=INTERNAL_ERROR_EXIT_CODE)


@timed
def sweep(
    ctx: typer.Context,
    config: ConfigOpt = DEFAULT_CONFIG,
    alpha: AlphaListOpt = None,
    beta: BetaListOpt = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
) -> None:
    """Solve, prune and summarize once per (α, β), writing sweep.csv.

    Without --alpha and --beta the config's sweep grid is used; a missing axis
    keeps the config's single value.
    """
    options = global_options(ctx)
    with handle_cli_errors():
        config_path = resolve_config_path(config)
        run_config = load_config(config_path).with_seed(
            seed if seed is not None else options.seed
        )
        grid = SweepGrid(alpha=list(alpha or []), beta=list(beta or []))
        rows = run_sweep(
            run_config,
            options.resolve_out(out),
            grid=grid if alpha or beta else None,
            workers=options.threads,
            config_path=config_path,
        )

    rich_print_sweep(rows)
