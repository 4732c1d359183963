"""Localized component factorization of the Jacobian, pruning and matching."""
from .component_model import (
    DEFAULT_PRUNE_THRESHOLD,
    ComponentModel,
    ComponentSummary,
    ObjectiveTerms,
    component_grids,
    max_offdiagonal_overlap,
    objective,
    objective_terms,
    prune,
    summarize,
)
from .matching import ComponentMatch, MatchResult, match_components, support_iou
from .optimizer import Adam
from .solver import (
    PRESETS,
    SolveReport,
    SolverConfig,
    SolverPreset,
    TraceEntry,
    UpdateRule,
    initial_model,
    solve,
)

__all__ = [
    "Adam",
    "ComponentMatch",
    "ComponentModel",
    "ComponentSummary",
    "DEFAULT_PRUNE_THRESHOLD",
    "MatchResult",
    "ObjectiveTerms",
    "PRESETS",
    "SolveReport",
    "SolverConfig",
    "SolverPreset",
    "TraceEntry",
    "UpdateRule",
    "component_grids",
    "initial_model",
    "match_components",
    "max_offdiagonal_overlap",
    "objective",
    "objective_terms",
    "prune",
    "solve",
    "summarize",
    "support_iou",
]
