"""Matching solved components against a known ground truth."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from dataclasses_json import dataclass_json
from scipy.optimize import linear_sum_assignment

from linsem.core.errors import ShapeMismatchError, UserInputError
from linsem.core.linalg import abs_cosine_matrix
from linsem.core.types import FloatArray
from linsem.localized.component_model import ComponentModel

__all__ = ["SUPPORT_FRACTION", "ComponentMatch", "MatchResult", "match_components", "support_iou"]

_matching_logger = logging.getLogger("linsem.localized.matching")

SUPPORT_FRACTION = 0.05


def support_iou(found: FloatArray, truth: FloatArray, fraction: float = SUPPORT_FRACTION) -> float:
    """Intersection over union of the supports of a solved and a true component.

    Both supports use one threshold, ``fraction`` of the true component's largest
    magnitude. Two empty supports give 1.
    """
    threshold = fraction * np.max(np.abs(truth), initial=0.0)
    if threshold == 0:
        return 1.0 if not np.any(found) else 0.0
    found_support = np.abs(found) >= threshold
    truth_support = np.abs(truth) >= threshold
    union = np.sum(found_support | truth_support)
    return float(np.sum(found_support & truth_support) / union)


@dataclass_json
@dataclass(frozen=True)
class ComponentMatch:
    """One matched pair.

    :param truth_index: Column of the ground truth.
    :param found_index: Column of the solved model assigned to it.
    :param abs_cos: ``|cos|`` between the two latent representations.
    :param support_iou: Support overlap of the two components.
    """

    truth_index: int
    found_index: int
    abs_cos: float
    support_iou: float


@dataclass_json
@dataclass(frozen=True)
class MatchResult:
    """The optimal assignment, ordered by ground-truth column."""

    matches: List[ComponentMatch]

    @property
    def assignment(self) -> List[int]:
        """``assignment[t]`` is the found column matched to truth column ``t``."""
        return [match.found_index for match in self.matches]

    @property
    def min_abs_cos(self) -> float:
        return min((m.abs_cos for m in self.matches), default=1.0)

    @property
    def min_support_iou(self) -> float:
        return min((m.support_iou for m in self.matches), default=1.0)


def match_components(found: ComponentModel, truth: ComponentModel) -> MatchResult:
    """Assign every ground-truth component to a distinct solved component.

    The assignment maximizes the total ``|cos|`` between latent representations
    and is solved exactly. Signs do not matter.

    :param found: The solved (possibly pruned) model.
    :param truth: The ground-truth model.
    :raises UserInputError: If ``found`` has fewer components than ``truth``.
    """
    if found.n_components < truth.n_components:
        raise UserInputError(
            f"cannot match {truth.n_components} ground-truth components with only "
            f"{found.n_components} found"
        )
    if found.dim != truth.dim or found.n_targets != truth.n_targets:
        raise ShapeMismatchError(
            f"found model is {found.n_targets}x{found.dim}, truth is "
            f"{truth.n_targets}x{truth.dim}"
        )
    if truth.n_components == 0:
        return MatchResult(matches=[])

    similarity = abs_cosine_matrix(truth.v_hat, found.v_hat)
    truth_rows, found_cols = linear_sum_assignment(similarity, maximize=True)
    matches = [
        ComponentMatch(
            truth_index=int(t),
            found_index=int(f),
            abs_cos=float(similarity[t, f]),
            support_iou=support_iou(found.u[:, f], truth.u[:, t]),
        )
        for t, f in zip(truth_rows, found_cols)
    ]
    result = MatchResult(matches=matches)
    _matching_logger.debug(
        f"Matched {len(matches)} components, min |cos| {result.min_abs_cos:.4f}, "
        f"min IoU {result.min_support_iou:.4f}"
    )
    return result
