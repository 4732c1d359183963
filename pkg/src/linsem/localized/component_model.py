"""Sparse components U, unit latent representations V̂ and the factorization objective."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Sequence

import numpy as np
from dataclasses_json import dataclass_json

from linsem.core.errors import InvalidParameterError, NonUnitColumnError, ShapeMismatchError
from linsem.core.linalg import column_norms
from linsem.core.types import FloatArray
from linsem.jacobian import JacobianMatrix

__all__ = [
    "DEFAULT_PRUNE_THRESHOLD",
    "OBJECTIVE_UNIT_TOLERANCE",
    "ComponentModel",
    "ComponentSummary",
    "ObjectiveTerms",
    "component_grids",
    "max_offdiagonal_overlap",
    "objective",
    "objective_terms",
    "prune",
    "summarize",
]

_model_logger = logging.getLogger("linsem.localized.model")

DEFAULT_PRUNE_THRESHOLD = 0.01
OBJECTIVE_UNIT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ComponentModel:
    """A factorization ``J ≈ U V̂ᵀ``.

    :param u: The S×P sparse semantic components.
    :param v_hat: The d×P latent representations.
    :param alpha: Weight of the L1 penalty on ``u``.
    :param beta: Weight of the orthogonality penalty on ``v_hat``.
    """

    u: FloatArray
    v_hat: FloatArray
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=np.float64)
        v_hat = np.asarray(self.v_hat, dtype=np.float64)
        if u.ndim != 2 or v_hat.ndim != 2:
            raise ShapeMismatchError(
                f"U and V̂ must be matrices, got shapes {u.shape} and {v_hat.shape}"
            )
        if u.shape[1] != v_hat.shape[1]:
            raise ShapeMismatchError(
                f"U has {u.shape[1]} components but V̂ has {v_hat.shape[1]}"
            )
        if self.alpha < 0 or self.beta < 0:
            raise InvalidParameterError(
                f"alpha and beta must be >= 0, got {self.alpha} and {self.beta}"
            )
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v_hat", v_hat)

    @property
    def n_components(self) -> int:
        """P, the number of components."""
        return self.u.shape[1]

    @property
    def n_targets(self) -> int:
        return self.u.shape[0]

    @property
    def dim(self) -> int:
        return self.v_hat.shape[0]

    def reconstruction(self) -> FloatArray:
        """``U V̂ᵀ``, the S×d matrix the model stands for."""
        return self.u @ self.v_hat.T

    def non_unit_columns(self, tolerance: float) -> List[int]:
        """Indices of ``v_hat`` columns whose norm is off by more than ``tolerance``."""
        off = np.abs(column_norms(self.v_hat) - 1.0) > tolerance
        return np.flatnonzero(off).tolist()


class ObjectiveTerms(NamedTuple):
    """The factorization objective and its three parts."""

    total: float
    recon: float
    l1: float
    ortho: float


def _overlap(v_hat: FloatArray) -> FloatArray:
    gram = v_hat.T @ v_hat
    np.fill_diagonal(gram, 0.0)
    return gram


def objective_terms(
    u: FloatArray, v_hat: FloatArray, j: FloatArray, alpha: float, beta: float
) -> ObjectiveTerms:
    """Evaluate the objective on raw arrays without any checks."""
    recon = float(np.sum((j - u @ v_hat.T) ** 2))
    l1 = float(alpha * np.sum(np.abs(u)))
    ortho = float(beta * np.sum(_overlap(v_hat) ** 2))
    return ObjectiveTerms(total=recon + l1 + ortho, recon=recon, l1=l1, ortho=ortho)


def objective(model: ComponentModel, j: JacobianMatrix) -> ObjectiveTerms:
    """``‖J - UV̂ᵀ‖²_F + α‖U‖₁ + β Σ_{i≠j} (v̂_iᵀv̂_j)²`` over ordered pairs.

    :param model: The factorization.
    :param j: The Jacobian it approximates.
    :raises ShapeMismatchError: If the shapes disagree with ``j``.
    :raises NonUnitColumnError: If a ``v_hat`` column is off unit length by more than 1e-6.
    """
    if model.n_targets != j.n_targets or model.dim != j.dim:
        raise ShapeMismatchError(
            f"model is {model.n_targets}x{model.dim} but jacobian is "
            f"{j.n_targets}x{j.dim}"
        )
    if bad := model.non_unit_columns(OBJECTIVE_UNIT_TOLERANCE):
        raise NonUnitColumnError(bad, OBJECTIVE_UNIT_TOLERANCE)
    return objective_terms(model.u, model.v_hat, j.data, model.alpha, model.beta)


def prune(model: ComponentModel, threshold: float = DEFAULT_PRUNE_THRESHOLD) -> ComponentModel:
    """Drop every component whose ``‖u_p‖₂`` is below the threshold.

    Survivors keep their order. The result may have no components at all.

    :param model: The model to prune.
    :param threshold: The norm cutoff, 0.01 by default.
    """
    if threshold < 0:
        raise InvalidParameterError(f"threshold must be >= 0, got {threshold}")
    keep = column_norms(model.u) >= threshold
    _model_logger.debug(
        f"Pruning keeps {int(keep.sum())} of {model.n_components} components "
        f"at threshold {threshold}"
    )
    return ComponentModel(
        u=model.u[:, keep],
        v_hat=model.v_hat[:, keep],
        alpha=model.alpha,
        beta=model.beta,
    )


def component_grids(model: ComponentModel, target_shape: Sequence[int]) -> List[FloatArray]:
    """Every ``u_p`` reshaped to a 2-D grid for inspection.

    A target shape ``[H, W, ...]`` becomes an ``H × (W·...)`` grid; a flat shape
    becomes a single row.

    :param model: The model.
    :param target_shape: Sizes whose product is S.
    """
    shape = list(target_shape) or [model.n_targets]
    if math.prod(shape) != model.n_targets:
        raise ShapeMismatchError(
            f"target shape {shape} does not multiply out to {model.n_targets}"
        )
    rows = shape[0] if len(shape) > 1 else 1
    return [model.u[:, p].reshape(rows, -1) for p in range(model.n_components)]


def max_offdiagonal_overlap(v_hat: FloatArray) -> float:
    """The largest ``|v̂_iᵀv̂_j|`` over ``i ≠ j``, zero for fewer than two columns."""
    v_hat = np.asarray(v_hat, dtype=np.float64)
    if v_hat.ndim != 2 or v_hat.shape[1] < 2:
        return 0.0
    return float(np.max(np.abs(_overlap(v_hat))))


@dataclass_json
@dataclass(frozen=True)
class ComponentSummary:
    """Aggregate statistics of a (pruned) model.

    :param surviving: How many components there are.
    :param mean_l1: Mean ``‖u_p‖₁`` over the components, 0 when there are none.
    :param max_offdiag: Largest ``|v̂_iᵀv̂_j|`` over distinct pairs.
    :param objective: The objective total, if a Jacobian was given.
    """

    surviving: int
    mean_l1: float
    max_offdiag: float
    objective: float | None = None

    def as_row(self) -> Dict[str, float | int | None]:
        return {
            "surviving": self.surviving,
            "mean_l1": self.mean_l1,
            "max_offdiag": self.max_offdiag,
            "objective": self.objective,
        }


def summarize(model: ComponentModel, j: JacobianMatrix | None = None) -> ComponentSummary:
    """Summarize a model for sweeps and reports."""
    l1_norms = np.sum(np.abs(model.u), axis=0)
    value = None
    if j is not None:
        value = objective_terms(model.u, model.v_hat, j.data, model.alpha, model.beta).total
    return ComponentSummary(
        surviving=model.n_components,
        mean_l1=float(l1_norms.mean()) if model.n_components else 0.0,
        max_offdiag=max_offdiagonal_overlap(model.v_hat),
        objective=value,
    )
