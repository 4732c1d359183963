"""The aggregate report of a pipeline run."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Self

import numpy as np
from dataclasses_json import dataclass_json

from linsem.core.errors import ManifestError
from linsem.core.linalg import column_norms
from linsem.localized import ComponentMatch, ComponentSummary, TraceEntry, summarize
from linsem.pipeline.stages import RunContext

__all__ = ["REPORT_NAME", "CriterionResult", "Report", "build_report"]

REPORT_NAME = "report.json"


@dataclass_json
@dataclass(frozen=True)
class CriterionResult:
    """One recovery check.

    :param name: What is checked.
    :param value: The measured value.
    :param threshold: The bound it is held against.
    :param comparison: ``">="`` or ``"<"``.
    :param passed: Whether the value meets the bound.
    """

    name: str
    value: float
    threshold: float
    comparison: str
    passed: bool

    @classmethod
    def at_least(cls, name: str, value: float, threshold: float) -> Self:
        return cls(name, float(value), float(threshold), ">=", bool(value >= threshold))

    @classmethod
    def below(cls, name: str, value: float, threshold: float) -> Self:
        return cls(name, float(value), float(threshold), "<", bool(value < threshold))


@dataclass_json
@dataclass
class Report:
    """Recovery scores, objective traces and cluster labels of one run."""

    seed: int
    stages: List[str]
    criteria: List[CriterionResult] = field(default_factory=list)
    direction_cos: Dict[str, float] = field(default_factory=dict)
    jacobian_rel_error: Optional[float] = None
    objective_trace: List[TraceEntry] = field(default_factory=list)
    iterations_run: Optional[int] = None
    converged: Optional[bool] = None
    solver_warnings: List[str] = field(default_factory=list)
    summary: Optional[ComponentSummary] = None
    cluster_labels: Optional[List[int]] = None
    matches: List[ComponentMatch] = field(default_factory=list)
    passed: bool = False

    @classmethod
    def load(cls, path: Path) -> Self:
        path = Path(path)
        if path.is_dir():
            path = path / REPORT_NAME
        if not path.is_file():
            raise ManifestError(f"no report at {path}")
        return cls.from_json(path.read_text(encoding="utf-8"))  # type: ignore

    def save(self, path: Path) -> None:
        Path(path).write_text(
            self.to_json(indent=2) + "\n", encoding="utf-8"  # type: ignore
        )


def _component_criteria(ctx: RunContext, report: Report) -> None:
    criteria = ctx.config.criteria
    match = ctx.match
    if match is None:
        return
    report.matches = list(match.matches)
    report.criteria.append(
        CriterionResult.at_least("component_min_cos", match.min_abs_cos, criteria.component_min_cos)
    )
    report.criteria.append(
        CriterionResult.at_least(
            "component_min_support_iou", match.min_support_iou, criteria.component_min_iou
        )
    )

    found = ctx.final_model
    world = ctx.require(ctx.world, "world")
    extras = np.setdiff1d(np.arange(found.n_components), match.assignment)
    if extras.size:
        extra_norm = float(np.max(column_norms(found.u[:, extras])))
        smallest_truth = float(np.min(column_norms(world.u_star)))
        report.criteria.append(
            CriterionResult.below(
                "extra_component_norm_ratio", extra_norm / smallest_truth, 0.1
            )
        )


def build_report(ctx: RunContext) -> Report:
    """Collect every score the stages of a run produced."""
    config = ctx.config
    report = Report(seed=config.seed, stages=list(config.stages))

    if ctx.directions and ctx.world is not None:
        for name, direction in ctx.directions.items():
            cos = abs(float(direction.v @ ctx.world.direction(name)))
            report.direction_cos[name] = cos
            report.criteria.append(
                CriterionResult.at_least(
                    f"direction_cos[{name}]", cos, config.criteria.direction_min_cos
                )
            )

    if ctx.jacobian is not None and ctx.world is not None:
        truth = ctx.world.jacobian_truth()
        error = float(
            np.linalg.norm(ctx.jacobian.data - truth) / np.linalg.norm(truth)
        )
        report.jacobian_rel_error = error
        report.criteria.append(
            CriterionResult.below(
                "jacobian_rel_error", error, config.criteria.jacobian_max_rel_error
            )
        )

    if ctx.solve_report is not None:
        report.objective_trace = list(ctx.solve_report.objective_trace)
        report.iterations_run = ctx.solve_report.iterations_run
        report.converged = ctx.solve_report.converged
        report.solver_warnings = list(ctx.solve_report.warnings)
        final = ctx.solve_report.final
        report.summary = replace(
            summarize(ctx.final_model), objective=final.total if final else None
        )

    report.cluster_labels = ctx.labels
    _component_criteria(ctx, report)
    report.passed = all(criterion.passed for criterion in report.criteria)
    return report
