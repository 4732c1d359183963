"""Closed-form semantic direction regression and latent manipulation."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Self

import numpy as np
from dataclasses_json import config, dataclass_json
from numpy.typing import ArrayLike

from linsem.core.errors import (
    ConstantSemanticError,
    InsufficientSamplesError,
    InvalidParameterError,
    ShapeMismatchError,
)
from linsem.core.linalg import NormalEquationSolver
from linsem.core.types import FloatArray, LatentBatch, as_matrix, as_vector

__all__ = [
    "DifferenceSet",
    "DirectionVector",
    "attach_sigma",
    "fit_direction",
    "fit_directions",
    "make_differences",
    "manipulate",
    "traverse",
]

_direction_logger = logging.getLogger("linsem.direction")

_UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DifferenceSet:
    """Concatenated latent-code differences and the matching semantic differences.

    :param delta_w: The N×d matrix ΔW.
    :param delta_y: The N-vector ΔY.
    """

    delta_w: FloatArray
    delta_y: FloatArray

    def __post_init__(self) -> None:
        delta_w = as_matrix(self.delta_w, "delta_w")
        delta_y = as_vector(self.delta_y, "delta_y")
        if delta_w.shape[0] != delta_y.shape[0]:
            raise ShapeMismatchError(
                f"delta_w has {delta_w.shape[0]} rows but delta_y has {delta_y.shape[0]}"
            )
        if not (np.all(np.isfinite(delta_w)) and np.all(np.isfinite(delta_y))):
            raise InvalidParameterError("difference set contains non-finite entries")
        object.__setattr__(self, "delta_w", delta_w)
        object.__setattr__(self, "delta_y", delta_y)

    @property
    def n_samples(self) -> int:
        return self.delta_w.shape[0]

    @property
    def dim(self) -> int:
        return self.delta_w.shape[1]


def _array_field() -> object:
    return field(
        metadata=config(
            encoder=lambda v: [float(x) for x in v],
            decoder=lambda v: np.asarray(v, dtype=np.float64),
        )
    )


@dataclass_json
@dataclass(frozen=True)
class DirectionVector:
    """A unit-length manipulation vector with its projection scale.

    :param v: The unit d-vector.
    :param sigma_w: Standard deviation of ``wᵀv`` over a reference batch.
    :param residual_rms: RMS residual of the regression that produced ``v``.
    :param raw_norm: Norm of the unnormalized regression solution.
    :param sigma_set: Whether ``sigma_w`` was attached from a reference batch.
    """

    v: FloatArray = _array_field()  # type: ignore[assignment]
    sigma_w: float = 0.0
    residual_rms: float = 0.0
    raw_norm: float = 1.0
    sigma_set: bool = False

    def __post_init__(self) -> None:
        v = as_vector(self.v, "direction")
        if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOLERANCE:
            raise InvalidParameterError(
                f"direction must be unit length, got norm {np.linalg.norm(v)!r}"
            )
        if self.sigma_w < 0:
            raise InvalidParameterError(f"sigma_w must be >= 0, got {self.sigma_w}")
        object.__setattr__(self, "v", v)

    @classmethod
    def from_raw(cls, v_raw: ArrayLike, residual_rms: float = 0.0) -> Self:
        """Normalize an unnormalized direction.

        :raises ConstantSemanticError: If ``v_raw`` is zero.
        """
        v_raw = as_vector(v_raw, "raw direction")
        norm = float(np.linalg.norm(v_raw))
        if norm == 0.0:
            raise ConstantSemanticError()
        return cls(v=v_raw / norm, residual_rms=residual_rms, raw_norm=norm)

    @property
    def v_raw(self) -> FloatArray:
        """The unnormalized regression solution."""
        return self.v * self.raw_norm

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    @classmethod
    def load(cls, path: Path) -> Self:
        """Load a direction JSON file."""
        return cls.from_json(Path(path).read_text(encoding="utf-8"))  # type: ignore

    def save(self, path: Path) -> None:
        """Write the direction as JSON."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(indent=2) + "\n", encoding="utf-8")  # type: ignore


def make_differences(w_pairs: ArrayLike, y_values: ArrayLike) -> DifferenceSet:
    """Turn paired latent codes and semantic values into a difference set.

    :param w_pairs: A 2×N×d array; index 0 holds w₀ and index 1 holds w₁.
    :param y_values: A 2×N array of the matching semantic values.
    :raises ShapeMismatchError: If the shapes do not pair up.
    """
    pairs = np.asarray(w_pairs, dtype=np.float64)
    values = np.asarray(y_values, dtype=np.float64)
    if pairs.ndim != 3 or pairs.shape[0] != 2:
        raise ShapeMismatchError(f"w_pairs must be 2×N×d, got {pairs.shape}")
    if values.shape != (2, pairs.shape[1]):
        raise ShapeMismatchError(
            f"y_values must be 2×{pairs.shape[1]}, got {values.shape}"
        )
    return DifferenceSet(delta_w=pairs[1] - pairs[0], delta_y=values[1] - values[0])


def _direction_from_solution(
    v_raw: FloatArray, diffs: DifferenceSet
) -> DirectionVector:
    residual = diffs.delta_y - diffs.delta_w @ v_raw
    residual_rms = float(np.linalg.norm(residual) / np.sqrt(diffs.n_samples))
    return DirectionVector.from_raw(v_raw, residual_rms=residual_rms)


def fit_direction(diffs: DifferenceSet, ridge: float = 0.0) -> DirectionVector:
    """Regress the semantic gradient in closed form and normalize it.

    Solves ``v_raw = (ΔWᵀΔW + ridge·I)⁻¹ ΔWᵀΔY``. The sign follows ``v_raw``.

    :param diffs: The difference set.
    :param ridge: A non-negative ridge; zero requires N > d.
    :raises RankDeficientError: If the normal matrix is singular.
    :raises ConstantSemanticError: If the solution is exactly zero.
    """
    solver = NormalEquationSolver.factorize(diffs.delta_w, ridge)
    direction = _direction_from_solution(solver.solve(diffs.delta_y), diffs)
    _direction_logger.debug(
        f"Fitted direction from {diffs.n_samples} differences, "
        f"residual rms {direction.residual_rms:.3g}"
    )
    return direction


def fit_directions(
    delta_w: ArrayLike, delta_ys: Mapping[str, ArrayLike], ridge: float = 0.0
) -> Dict[str, DirectionVector]:
    """Fit several named semantics that share one ΔW, factorizing it once.

    :param delta_w: The shared N×d ΔW.
    :param delta_ys: Semantic name → N-vector ΔY.
    :param ridge: A non-negative ridge.
    """
    delta_w = as_matrix(delta_w, "delta_w")
    solver = NormalEquationSolver.factorize(delta_w, ridge)
    directions: Dict[str, DirectionVector] = {}
    for name, delta_y in delta_ys.items():
        diffs = DifferenceSet(delta_w=delta_w, delta_y=np.asarray(delta_y))
        directions[name] = _direction_from_solution(solver.solve(diffs.delta_y), diffs)
        _direction_logger.debug(f"Fitted direction '{name}'")
    return directions


def attach_sigma(direction: DirectionVector, reference: LatentBatch) -> DirectionVector:
    """Attach the unbiased standard deviation of ``wᵀv`` over a reference batch.

    :param direction: The direction.
    :param reference: The reference batch, N >= 2.
    :raises InsufficientSamplesError: If the reference has fewer than two rows.
    """
    if reference.n_samples < 2:
        raise InsufficientSamplesError(2, reference.n_samples)
    if reference.dim != direction.dim:
        raise ShapeMismatchError(
            f"reference batch has dimension {reference.dim}, direction {direction.dim}"
        )
    projections = reference.data @ direction.v
    sigma = float(np.std(projections, ddof=1))
    return replace(direction, sigma_w=sigma, sigma_set=True)


def manipulate(w: ArrayLike, direction: DirectionVector, s: float) -> FloatArray:
    """Move latent code(s) so that their projection onto ``v`` equals ``s·σ_w``.

    Computes ``w - (wᵀv)v + s·σ_w·v`` for a d-vector or every row of an N×d batch.

    :param w: A d-vector or an N×d batch.
    :param direction: The manipulation direction.
    :param s: The scale in units of ``σ_w``.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.shape[-1] != direction.dim:
        raise ShapeMismatchError(
            f"latent code has dimension {w.shape[-1]}, direction {direction.dim}"
        )
    if not direction.sigma_set:
        _direction_logger.warning(
            "Manipulating along a direction whose sigma_w was never attached; "
            f"using sigma_w={direction.sigma_w}"
        )

    v = direction.v
    projection = w @ v
    target = s * direction.sigma_w
    return w + np.multiply.outer(target - projection, v)


def traverse(
    w: ArrayLike, direction: DirectionVector, scales: Iterable[float]
) -> FloatArray:
    """Manipulate one latent code at a sequence of scales.

    :param w: The d-vector to start from.
    :param direction: The manipulation direction.
    :param scales: The scales, e.g. ``-4 .. 4``.
    :return: A ``len(scales)×d`` matrix, one manipulated code per scale.
    """
    w = as_vector(w, "latent code")
    scale_list: List[float] = [float(s) for s in scales]
    if not scale_list:
        raise InvalidParameterError("traverse needs at least one scale")
    return np.stack([manipulate(w, direction, s) for s in scale_list])
