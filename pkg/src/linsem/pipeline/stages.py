"""The pipeline stages. Each reads and extends a shared run context."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from linsem.cluster import (
    Dendrogram,
    abs_cosine_dissimilarity,
    cross_similarity,
    cut_clusters,
    ward_linkage,
    write_dot,
)
from linsem.core.errors import InternalError
from linsem.core.latent import sample_gaussian
from linsem.core.matrix_io import read_matrix, write_matrix
from linsem.core.types import FloatArray, derive_rng
from linsem.direction import DirectionVector, attach_sigma, fit_directions
from linsem.jacobian import JacobianMatrix, build_jacobian
from linsem.localized import (
    ComponentModel,
    MatchResult,
    SolveReport,
    match_components,
    prune,
    solve,
)
from linsem.oracle import (
    OracleWorld,
    make_world,
    observe_scalars,
    sample_canonical_differences,
    sample_pairs,
    save_world,
)
from linsem.pipeline.config import STAGES, PipelineConfig

__all__ = [
    "RunContext",
    "STAGE_RUNNERS",
    "StageOutput",
    "load_model",
    "save_model",
    "stage_rng",
]

_stages_logger = logging.getLogger("linsem.pipeline.stages")


@dataclass
class StageOutput:
    """What a stage reports back for its manifest.

    :param parameters: The parameters the stage ran with.
    :param inputs: Files from earlier stages it consumed.
    """

    parameters: Dict[str, Any] = field(default_factory=dict)
    inputs: List[Path] = field(default_factory=list)


@dataclass
class RunContext:
    """Intermediate results shared by the stages of one run.

    Large intermediates stay in memory; only what a stage declares is written.
    """

    config: PipelineConfig
    out_dir: Path
    workers: int = 1
    world: OracleWorld | None = None
    delta_w: FloatArray | None = None
    delta_targets: FloatArray | None = None
    directions: Dict[str, DirectionVector] = field(default_factory=dict)
    jacobian: JacobianMatrix | None = None
    model: ComponentModel | None = None
    solve_report: SolveReport | None = None
    pruned: ComponentModel | None = None
    dendrogram: Dendrogram | None = None
    labels: List[int] | None = None
    match: MatchResult | None = None
    files: Dict[str, Path] = field(default_factory=dict)

    def require[T](self, value: T | None, what: str) -> T:
        if value is None:
            raise InternalError(f"no {what} is available at this point of the run")
        return value

    @property
    def final_model(self) -> ComponentModel:
        """The pruned model if pruning ran, else the solved one."""
        return self.require(self.pruned or self.model, "component model")


def stage_rng(config: PipelineConfig, stage: str) -> np.random.Generator:
    """The stream of one stage, independent of which other stages run."""
    return derive_rng(config.seed, STAGES.index(stage))


def save_model(
    model: ComponentModel, out_dir: Path, seed: int | None, target_shape: List[int]
) -> List[Path]:
    """Write ``U.csv`` and ``Vhat.csv``."""
    u_path, v_path = Path(out_dir) / "U.csv", Path(out_dir) / "Vhat.csv"
    write_matrix(u_path, model.u, "components_u", seed, target_shape)
    write_matrix(v_path, model.v_hat, "components_v_hat", seed)
    return [u_path, v_path]


def load_model(
    model_dir: Path, alpha: float = 1.0, beta: float = 1.0
) -> Tuple[ComponentModel, List[int]]:
    """Read a model written by :func:`save_model` and its target shape."""
    model_dir = Path(model_dir)
    u, u_manifest = read_matrix(model_dir / "U.csv", role="components_u")
    v_hat, _ = read_matrix(model_dir / "Vhat.csv", role="components_v_hat")
    model = ComponentModel(u=u, v_hat=v_hat, alpha=alpha, beta=beta)
    return model, list(u_manifest.target_shape or [])


def run_synth(ctx: RunContext, stage_dir: Path) -> StageOutput:
    ctx.world = make_world(ctx.config.world)
    for path in save_world(ctx.world, stage_dir):
        ctx.files[path.stem] = path
    return StageOutput(parameters=asdict(ctx.config.world))


def run_observe(ctx: RunContext, stage_dir: Path) -> StageOutput:
    world = ctx.require(ctx.world, "world")
    settings = ctx.config.observe
    ctx.delta_w, ctx.delta_targets = sample_canonical_differences(
        world,
        settings.n_pairs,
        stage_rng(ctx.config, "observe"),
        settings.strategy,
        settings.perturbation,
    )
    if settings.save_observations:
        seed = ctx.config.seed
        write_matrix(stage_dir / "delta_w.csv", ctx.delta_w, "delta_w", seed)
        write_matrix(
            stage_dir / "delta_targets.csv", ctx.delta_targets, "delta_targets", seed
        )
    return StageOutput(
        parameters=asdict(settings), inputs=[ctx.files["u_star"], ctx.files["v_star"]]
    )


def run_direction(ctx: RunContext, stage_dir: Path) -> StageOutput:
    world = ctx.require(ctx.world, "world")
    settings = ctx.config.direction
    rng = stage_rng(ctx.config, "direction")
    w0, w1 = sample_pairs(
        world,
        settings.n_pairs,
        rng,
        ctx.config.observe.strategy,
        ctx.config.observe.perturbation,
    )
    y0 = observe_scalars(world, w0, rng)
    y1 = observe_scalars(world, w1, rng)
    fitted = fit_directions(
        w1 - w0, {name: y1[name] - y0[name] for name in y0}, ridge=settings.ridge
    )
    reference = sample_gaussian(settings.reference_samples, world.spec.d, rng)
    for name, direction in fitted.items():
        ctx.directions[name] = attach_sigma(direction, reference)
        ctx.directions[name].save(stage_dir / f"{name}.json")
    return StageOutput(parameters=asdict(settings), inputs=[ctx.files["directions"]])


def run_jacobian(ctx: RunContext, stage_dir: Path) -> StageOutput:
    world = ctx.require(ctx.world, "world")
    ctx.jacobian = build_jacobian(
        ctx.require(ctx.delta_w, "latent differences"),
        ctx.require(ctx.delta_targets, "target differences"),
        target_shape=world.target_shape,
        ridge=ctx.config.jacobian.ridge,
        workers=ctx.workers,
    )
    path = stage_dir / "J.csv"
    write_matrix(path, ctx.jacobian.data, "jacobian", ctx.config.seed, world.target_shape)
    ctx.files["jacobian"] = path
    return StageOutput(parameters=asdict(ctx.config.jacobian))


def run_components(ctx: RunContext, stage_dir: Path) -> StageOutput:
    settings = ctx.config.components
    jacobian = ctx.require(ctx.jacobian, "jacobian")
    ctx.model, ctx.solve_report = solve(
        jacobian,
        settings.p,
        settings.alpha,
        settings.beta,
        settings.solver_config(ctx.config.seed),
    )
    u_path, v_path = save_model(
        ctx.model, stage_dir, ctx.config.seed, jacobian.target_shape
    )
    ctx.solve_report.save(stage_dir / "report.json")
    ctx.files["components_u"], ctx.files["components_v_hat"] = u_path, v_path
    return StageOutput(parameters=asdict(settings), inputs=[ctx.files["jacobian"]])


def run_prune(ctx: RunContext, stage_dir: Path) -> StageOutput:
    model = ctx.require(ctx.model, "solved model")
    ctx.pruned = prune(model, ctx.config.prune.threshold)
    target_shape = ctx.require(ctx.jacobian, "jacobian").target_shape
    save_model(ctx.pruned, stage_dir, ctx.config.seed, target_shape)
    return StageOutput(
        parameters=asdict(ctx.config.prune),
        inputs=[ctx.files["components_u"], ctx.files["components_v_hat"]],
    )


def run_cluster(ctx: RunContext, stage_dir: Path) -> StageOutput:
    settings = ctx.config.cluster
    model = ctx.final_model
    if model.n_components < 2:
        _stages_logger.warning(
            f"Only {model.n_components} component(s) left, nothing to cluster"
        )
        ctx.labels = [0] * model.n_components
        return StageOutput(parameters=asdict(settings))

    dendrogram = ward_linkage(abs_cosine_dissimilarity(model.v_hat, settings.metric))
    ctx.labels = cut_clusters(dendrogram, min(settings.k, model.n_components))
    ctx.dendrogram = replace(dendrogram, labels=ctx.labels)
    ctx.dendrogram.save(stage_dir / "dendrogram.json")
    if settings.dot:
        write_dot(stage_dir / "dendrogram.dot", ctx.dendrogram)
    return StageOutput(parameters=asdict(settings), inputs=[ctx.files["components_v_hat"]])


def run_match(ctx: RunContext, stage_dir: Path) -> StageOutput:
    world = ctx.require(ctx.world, "world")
    found = ctx.final_model
    truth = world.truth_model()
    ctx.match = match_components(found, truth)
    (stage_dir / "matches.json").write_text(
        ctx.match.to_json(indent=2) + "\n", encoding="utf-8"  # type: ignore
    )
    if found.n_components:
        write_matrix(
            stage_dir / "cross_similarity.csv",
            cross_similarity(truth.v_hat, found.v_hat),
            "cross_similarity",
            ctx.config.seed,
        )
    return StageOutput(
        parameters={"truth_components": truth.n_components},
        inputs=[ctx.files["v_star"], ctx.files["components_v_hat"]],
    )


STAGE_RUNNERS: Dict[str, Callable[[RunContext, Path], StageOutput]] = {
    "synth": run_synth,
    "observe": run_observe,
    "direction": run_direction,
    "jacobian": run_jacobian,
    "components": run_components,
    "prune": run_prune,
    "cluster": run_cluster,
    "match": run_match,
}
