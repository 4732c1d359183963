"""Pipeline and sweep configuration files."""
from __future__ import annotations

import importlib.resources
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import dacite
import yaml
from dataclasses_json import dataclass_json

from linsem.cluster import Metric
from linsem.core.errors import ConfigError, UserInputError
from linsem.localized import DEFAULT_PRUNE_THRESHOLD, SolverConfig, UpdateRule
from linsem.oracle import OracleSpec, PairStrategy

__all__ = [
    "BUNDLED_CONFIGS",
    "ClusterSettings",
    "ComponentSettings",
    "Criteria",
    "DirectionSettings",
    "JacobianSettings",
    "ObserveSettings",
    "PipelineConfig",
    "PruneSettings",
    "STAGES",
    "SweepGrid",
    "bundled_config_path",
    "load_config",
    "parse_config",
    "resolve_config_path",
]

_config_logger = logging.getLogger("linsem.pipeline.config")

STAGES = ("synth", "observe", "direction", "jacobian", "components", "prune", "cluster", "match")

# stage → stages that must run before it
STAGE_REQUIRES: Dict[str, tuple[str, ...]] = {
    "synth": (),
    "observe": ("synth",),
    "direction": ("synth",),
    "jacobian": ("observe",),
    "components": ("jacobian",),
    "prune": ("components",),
    "cluster": ("components",),
    "match": ("components",),
}

BUNDLED_CONFIGS = ("oracle-e2e.json",)


@dataclass_json
@dataclass(frozen=True)
class ObserveSettings:
    n_pairs: int = 8192
    strategy: str = PairStrategy.INDEPENDENT.value
    perturbation: float = 0.1
    save_observations: bool = False


@dataclass_json
@dataclass(frozen=True)
class DirectionSettings:
    n_pairs: int = 4096
    ridge: float = 0.0
    reference_samples: int = 4096


@dataclass_json
@dataclass(frozen=True)
class JacobianSettings:
    ridge: float = 0.0


@dataclass_json
@dataclass(frozen=True)
class ComponentSettings:
    p: int = 8
    alpha: float = 1.0
    beta: float = 1.0
    lr: float = 1e-4
    max_iters: int = 500_000
    tol: float = 1e-6
    window: int = 1000
    update_rule: str = UpdateRule.SUBGRADIENT.value
    seed: Optional[int] = None

    def solver_config(self, run_seed: int) -> SolverConfig:
        """The solver settings, seeded from the run unless a seed is pinned here."""
        return SolverConfig(
            max_iters=self.max_iters,
            lr=self.lr,
            seed=self.seed if self.seed is not None else run_seed,
            tol=self.tol,
            window=self.window,
            update_rule=UpdateRule(self.update_rule),
        )


@dataclass_json
@dataclass(frozen=True)
class PruneSettings:
    threshold: float = DEFAULT_PRUNE_THRESHOLD


@dataclass_json
@dataclass(frozen=True)
class ClusterSettings:
    k: int = 3
    metric: str = Metric.ABS_COSINE.value
    dot: bool = True


@dataclass_json
@dataclass(frozen=True)
class Criteria:
    """Pass thresholds for the recovery scores in the report."""

    direction_min_cos: float = 0.999
    jacobian_max_rel_error: float = 0.05
    component_min_cos: float = 0.95
    component_min_iou: float = 0.8


@dataclass_json
@dataclass(frozen=True)
class SweepGrid:
    alpha: List[float] = field(default_factory=list)
    beta: List[float] = field(default_factory=list)


@dataclass_json
@dataclass(frozen=True)
class PipelineConfig:
    """A complete run description.

    :param seed: The run seed every stage stream derives from.
    :param stages: The stages to run, in order.
    :param world: The planted world.
    """

    seed: int = 0
    stages: List[str] = field(default_factory=lambda: list(STAGES))
    world: OracleSpec = field(default_factory=OracleSpec)
    observe: ObserveSettings = field(default_factory=ObserveSettings)
    direction: DirectionSettings = field(default_factory=DirectionSettings)
    jacobian: JacobianSettings = field(default_factory=JacobianSettings)
    components: ComponentSettings = field(default_factory=ComponentSettings)
    prune: PruneSettings = field(default_factory=PruneSettings)
    cluster: ClusterSettings = field(default_factory=ClusterSettings)
    criteria: Criteria = field(default_factory=Criteria)
    sweep: SweepGrid = field(default_factory=SweepGrid)

    def with_seed(self, seed: int | None) -> PipelineConfig:
        """A copy with the run seed replaced, if one is given."""
        if seed is None:
            return self
        return dacite.from_dict(PipelineConfig, {**asdict(self), "seed": seed})

    def parameters(self) -> Dict[str, Any]:
        return asdict(self)


def _check_stages(stages: List[str]) -> None:
    if not stages:
        raise ConfigError("the stage list is empty")
    unknown = [stage for stage in stages if stage not in STAGE_REQUIRES]
    if unknown:
        raise ConfigError(
            f"unknown stage(s) {unknown}; known stages are {', '.join(STAGES)}"
        )
    if len(set(stages)) != len(stages):
        raise ConfigError(f"stages repeat: {stages}")
    for index, stage in enumerate(stages):
        missing = [req for req in STAGE_REQUIRES[stage] if req not in stages[:index]]
        if missing:
            raise ConfigError(f"stage '{stage}' needs {missing} to run before it")


def _check_settings(config: PipelineConfig) -> None:
    try:
        PairStrategy(config.observe.strategy)
        Metric(config.cluster.metric)
        config.components.solver_config(config.seed)
    except (ValueError, UserInputError) as e:
        raise ConfigError(str(e)) from e
    if config.observe.n_pairs < 1 or config.direction.n_pairs < 1:
        raise ConfigError("n_pairs must be positive")
    if config.direction.reference_samples < 2:
        raise ConfigError("reference_samples must be at least 2")
    if config.components.p < 1:
        raise ConfigError(f"components.p must be at least 1, got {config.components.p}")
    if config.prune.threshold < 0 or config.cluster.k < 1:
        raise ConfigError("prune.threshold must be >= 0 and cluster.k >= 1")


def parse_config(data: Dict[str, Any]) -> PipelineConfig:
    """Validate a decoded config mapping.

    :raises ConfigError: On unknown keys, wrong types, unknown stages or bad values.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"a config must be a mapping, got {type(data).__name__}")
    try:
        config = dacite.from_dict(
            PipelineConfig, data, config=dacite.Config(strict=True, cast=[float])
        )
    except (dacite.DaciteError, UserInputError, TypeError, ValueError) as e:
        raise ConfigError(f"schema violation: {e}") from e
    _check_stages(config.stages)
    _check_settings(config)
    return config


def bundled_config_path(name: str) -> Path:
    """The path of a config shipped with the package."""
    resource = importlib.resources.files("linsem.pipeline.resources") / name
    with importlib.resources.as_file(resource) as path:
        return Path(path)


def resolve_config_path(path: Path | str) -> Path:
    """The file a config argument names. A bare bundled name resolves to the package copy.

    :raises ConfigError: If there is no such file.
    """
    path = Path(path)
    if not path.is_file() and path.name in BUNDLED_CONFIGS and len(path.parts) == 1:
        path = bundled_config_path(path.name)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    return path


def load_config(path: Path | str) -> PipelineConfig:
    """Read a JSON or YAML config. Bundled config names resolve to package resources.

    :raises ConfigError: If the file is missing, unreadable or invalid.
    """
    path = resolve_config_path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    config = parse_config(data)
    _config_logger.debug(f"Loaded config {path} with stages {config.stages}")
    return config
