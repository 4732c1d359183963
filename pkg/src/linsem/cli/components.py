"""CLI commands factorizing a Jacobian into localized components and pruning them."""
from dataclasses import asdict, replace
from pathlib import Path
from typing import Annotated, Optional

import typer

from linsem.cli.cli_options import (
    DirArg,
    OutOpt,
    SeedOpt,
    ThresholdOpt,
    UpdateRuleOpt,
    timed,
)
from linsem.cli.rich_output import rich_print_components
from linsem.cli.utils import cli_logger, global_options, handle_cli_errors
from linsem.core.errors import InvalidParameterError, ManifestError
from linsem.core.matrix_io import read_matrix, write_matrix
from linsem.jacobian import JacobianMatrix
from linsem.localized import (
    DEFAULT_PRUNE_THRESHOLD,
    PRESETS,
    SolverConfig,
    UpdateRule,
    component_grids,
    solve,
    summarize,
)
from linsem.localized import prune as prune_model
from linsem.pipeline import RunManifest, load_model, save_model

DEFAULT_PRESET = "ffhq"


def _read_jacobian(path: Path) -> JacobianMatrix:
    data, manifest = read_matrix(path)
    return JacobianMatrix(data=data, target_shape=list(manifest.target_shape or []))


@timed
def fit_components(
    ctx: typer.Context,
    jacobian: Annotated[
        Path, typer.Option(exists=True, dir_okay=False, help="The S×d Jacobian CSV.")
    ],
    p: Annotated[
        Optional[int],
        typer.Option("-P", "--components", help="Number of components.", min=1),
    ] = None,
    alpha: Annotated[
        Optional[float], typer.Option(help="L1 weight on U.", min=0.0)
    ] = None,
    beta: Annotated[
        Optional[float], typer.Option(help="Orthogonality weight on V̂.", min=0.0)
    ] = None,
    preset: Annotated[
        str,
        typer.Option(
            help=f"Named (P, α, β) defaults: {', '.join(PRESETS)}. "
            "Explicit -P, --alpha and --beta win."
        ),
    ] = DEFAULT_PRESET,
    lr: Annotated[float, typer.Option(help="Adam learning rate.", min=0.0)] = 1e-4,
    max_iters: Annotated[int, typer.Option(help="Iteration cap.", min=0)] = 500_000,
    tol: Annotated[
        float, typer.Option(help="Relative decrease per window that stops the run.", min=0.0)
    ] = 1e-6,
    window: Annotated[
        int, typer.Option(help="Iterations between convergence checks.", min=1)
    ] = 1000,
    log_every: Annotated[
        int, typer.Option(help="Iterations between trace entries, the window if 0.", min=0)
    ] = 0,
    update_rule: UpdateRuleOpt = UpdateRule.SUBGRADIENT,
    grids: Annotated[
        bool,
        typer.Option(is_flag=True, help="Also write every u_p reshaped to the target grid."),
    ] = False,
    out: OutOpt = None,
    seed: SeedOpt = None,
) -> None:
    """Factor a Jacobian into sparse components with near-orthogonal directions.

    Writes U.csv, Vhat.csv, report.json and manifest.json.
    """
    options = global_options(ctx)
    with handle_cli_errors():
        if preset not in PRESETS:
            raise InvalidParameterError(
                f"unknown preset '{preset}', choose one of {', '.join(PRESETS)}"
            )
        chosen = PRESETS[preset]
        p = p if p is not None else chosen.p
        alpha = alpha if alpha is not None else chosen.alpha
        beta = beta if beta is not None else chosen.beta

        config = SolverConfig(
            max_iters=max_iters,
            lr=lr,
            seed=options.resolve_seed(seed),
            tol=tol,
            window=window,
            update_rule=update_rule,
            log_every=log_every,
        )
        j = _read_jacobian(jacobian)
        cli_logger.debug(f"Solving P={p} α={alpha} β={beta} with {config}")
        model, report = solve(j, p, alpha, beta, config)

        out_dir = options.resolve_out(out)
        save_model(model, out_dir, config.seed, j.target_shape)
        report.save(out_dir / "report.json")
        if grids:
            for index, grid in enumerate(component_grids(model, j.target_shape)):
                write_matrix(out_dir / f"grid_{index:03d}.csv", grid, "component_grid")
        RunManifest.for_inputs(
            command="fit-components",
            parameters={
                **asdict(config),
                "update_rule": config.update_rule.value,
                "p": p,
                "alpha": alpha,
                "beta": beta,
                "preset": preset,
            },
            inputs=[jacobian],
            seed=config.seed,
        ).write(out_dir)

    final = report.final
    rich_print_components(
        replace(summarize(model), objective=final.total if final else None), report
    )


def _model_weights(model_dir: Path) -> tuple[float, float]:
    try:
        parameters = RunManifest.load(model_dir).parameters
    except ManifestError:
        return 1.0, 1.0
    return float(parameters.get("alpha", 1.0)), float(parameters.get("beta", 1.0))


@timed
def prune(
    ctx: typer.Context,
    model: DirArg,
    threshold: ThresholdOpt = DEFAULT_PRUNE_THRESHOLD,
    jacobian: Annotated[
        Optional[Path],
        typer.Option(
            exists=True, dir_okay=False, help="The Jacobian, to report the pruned objective."
        ),
    ] = None,
    out: OutOpt = None,
) -> None:
    """Drop components whose U column norm is below the threshold."""
    options = global_options(ctx)
    with handle_cli_errors():
        alpha, beta = _model_weights(model)
        solved, target_shape = load_model(model, alpha, beta)
        pruned = prune_model(solved, threshold)
        summary = summarize(pruned, _read_jacobian(jacobian) if jacobian else None)

        out_dir = options.resolve_out(out)
        save_model(pruned, out_dir, None, target_shape)
        RunManifest.for_inputs(
            command="prune",
            parameters={"threshold": threshold, "alpha": alpha, "beta": beta},
            inputs=[model / "U.csv", model / "Vhat.csv"],
        ).write(out_dir)

    rich_print_components(
        summary, title=f"Pruned {solved.n_components} → {pruned.n_components}"
    )
