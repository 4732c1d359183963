"""α/β grids over the component solver on one planted world."""
from __future__ import annotations

import csv
import itertools
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Sequence

from dataclasses_json import dataclass_json

from linsem.core.errors import ConfigError
from linsem.core.matrix_io import format_float
from linsem.jacobian import build_jacobian
from linsem.localized import prune, solve, summarize
from linsem.oracle import make_world, sample_canonical_differences
from linsem.pipeline.config import PipelineConfig, SweepGrid
from linsem.pipeline.manifest import RunManifest
from linsem.pipeline.stages import stage_rng

__all__ = ["SWEEP_COLUMNS", "SweepRow", "run_sweep", "write_sweep_csv"]

_sweep_logger = logging.getLogger("linsem.pipeline.sweep")

SWEEP_COLUMNS = ("alpha", "beta", "surviving", "mean_l1", "max_offdiag", "objective")
SWEEP_CSV = "sweep.csv"


@dataclass_json
@dataclass(frozen=True)
class SweepRow:
    """One grid point: the pruned model's summary and the solver's final objective."""

    alpha: float
    beta: float
    surviving: int
    mean_l1: float
    max_offdiag: float
    objective: float


def _grid(config: PipelineConfig, grid: SweepGrid | None) -> SweepGrid:
    grid = grid or config.sweep
    alphas = list(grid.alpha) or [config.components.alpha]
    betas = list(grid.beta) or [config.components.beta]
    if not grid.alpha and not grid.beta:
        raise ConfigError("the sweep grid is empty; give at least one alpha or beta")
    if any(value < 0 for value in alphas + betas):
        raise ConfigError(f"alpha and beta must be >= 0, got {alphas} and {betas}")
    return SweepGrid(alpha=alphas, beta=betas)


def run_sweep(
    config: PipelineConfig,
    out_dir: Path | None = None,
    grid: SweepGrid | None = None,
    workers: int = 1,
    config_path: Path | None = None,
) -> List[SweepRow]:
    """Solve, prune and summarize once per (α, β) on the configured world.

    The world, the observations and the Jacobian are drawn exactly as
    :func:`linsem.pipeline.runner.pipeline_run` draws them, so a 1×1 grid reproduces
    a pipeline run's summary.

    :param config: The run description; its ``components`` and ``prune`` settings apply.
    :param out_dir: Where ``sweep.csv`` and its manifest go, if anywhere.
    :param grid: The grid, ``config.sweep`` when omitted. A missing axis uses the
        config's single value.
    :param workers: Threads for the Jacobian.
    :param config_path: The config file, hashed into the manifest.
    :raises ConfigError: If the grid is empty.
    """
    grid = _grid(config, grid)
    world = make_world(config.world)
    delta_w, delta_targets = sample_canonical_differences(
        world,
        config.observe.n_pairs,
        stage_rng(config, "observe"),
        config.observe.strategy,
        config.observe.perturbation,
    )
    jacobian = build_jacobian(
        delta_w,
        delta_targets,
        target_shape=world.target_shape,
        ridge=config.jacobian.ridge,
        workers=workers,
    )

    settings = config.components
    rows: List[SweepRow] = []
    for alpha, beta in itertools.product(grid.alpha, grid.beta):
        model, report = solve(
            jacobian, settings.p, alpha, beta, settings.solver_config(config.seed)
        )
        summary = summarize(prune(model, config.prune.threshold))
        rows.append(
            SweepRow(
                alpha=alpha,
                beta=beta,
                surviving=summary.surviving,
                mean_l1=summary.mean_l1,
                max_offdiag=summary.max_offdiag,
                objective=report.final.total if report.final else float("nan"),
            )
        )
        _sweep_logger.info(f"alpha={alpha:g} beta={beta:g}: {rows[-1]}")

    if out_dir is not None:
        write_sweep_csv(rows, Path(out_dir) / SWEEP_CSV)
        RunManifest.for_inputs(
            command="sweep",
            parameters={**config.parameters(), "grid": asdict(grid)},
            inputs=[config_path] if config_path is not None else [],
            seed=config.seed,
        ).write(out_dir)
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: Path) -> None:
    """One header line, then one line per grid point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    format_float(row.alpha),
                    format_float(row.beta),
                    row.surviving,
                    format_float(row.mean_l1),
                    format_float(row.max_offdiag),
                    format_float(row.objective),
                ]
            )
