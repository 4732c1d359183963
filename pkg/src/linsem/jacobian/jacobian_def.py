"""The stacked canonical Jacobian, one regression per target dimension."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from numpy.typing import ArrayLike

from linsem.core.errors import InvalidParameterError, ShapeMismatchError
from linsem.core.linalg import NormalEquationSolver
from linsem.core.types import FloatArray, as_matrix

__all__ = ["CHUNK_COLUMNS", "JacobianMatrix", "build_jacobian"]

_jacobian_logger = logging.getLogger("linsem.jacobian")

# Fixed chunk width so results do not depend on the worker count.
CHUNK_COLUMNS = 256


@dataclass(frozen=True)
class JacobianMatrix:
    """An S×d matrix of unnormalized per-target-dimension gradients.

    :param data: The S×d matrix; row p is the latent gradient of target dimension p.
    :param target_shape: Dimension sizes whose product is S, e.g. ``[H, W, C]``.
    """

    data: FloatArray
    target_shape: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        data = as_matrix(self.data, "jacobian")
        shape = list(self.target_shape) or [data.shape[0]]
        if any(size < 1 for size in shape) or math.prod(shape) != data.shape[0]:
            raise ShapeMismatchError(
                f"target shape {shape} does not multiply out to {data.shape[0]} rows"
            )
        if not np.all(np.isfinite(data)):
            raise InvalidParameterError("jacobian contains non-finite entries")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "target_shape", [int(size) for size in shape])

    @property
    def n_targets(self) -> int:
        """S, the number of target dimensions."""
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        """d, the latent dimension."""
        return self.data.shape[1]

    def column_map(self, k: int) -> FloatArray:
        """Latent coordinate ``k``'s gradient reshaped to the target shape."""
        return self.data[:, k].reshape(self.target_shape)


def build_jacobian(
    delta_w: ArrayLike,
    delta_targets: ArrayLike,
    target_shape: Sequence[int] | None = None,
    ridge: float = 0.0,
    workers: int = 1,
) -> JacobianMatrix:
    """Regress every target dimension on the latent differences.

    One factorization of ``ΔWᵀΔW`` serves all S solves. Rows keep their scale.
    Columns are solved in fixed chunks so the result is bit-identical for any
    ``workers``.

    :param delta_w: The N×d latent differences.
    :param delta_targets: The N×S target differences.
    :param target_shape: Sizes whose product is S. Defaults to ``[S]``.
    :param ridge: A non-negative ridge; zero requires N > d.
    :param workers: Threads solving column chunks.
    :raises RankDeficientError: If the normal matrix is singular.
    """
    delta_w = as_matrix(delta_w, "delta_w")
    delta_targets = as_matrix(delta_targets, "delta_targets")
    if delta_targets.shape[0] != delta_w.shape[0]:
        raise ShapeMismatchError(
            f"delta_w has {delta_w.shape[0]} rows but delta_targets has "
            f"{delta_targets.shape[0]}"
        )
    if delta_targets.shape[1] < 1:
        raise ShapeMismatchError("delta_targets needs at least one column")
    if workers < 1:
        raise InvalidParameterError(f"workers must be positive, got {workers}")

    solver = NormalEquationSolver.factorize(delta_w, ridge)
    n_targets = delta_targets.shape[1]
    result = np.empty((n_targets, delta_w.shape[1]))

    def _solve_chunk(start: int) -> None:
        stop = min(start + CHUNK_COLUMNS, n_targets)
        result[start:stop] = solver.solve(delta_targets[:, start:stop]).T

    starts = range(0, n_targets, CHUNK_COLUMNS)
    if workers == 1:
        for start in starts:
            _solve_chunk(start)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_solve_chunk, starts))

    _jacobian_logger.debug(
        f"Built {n_targets}x{delta_w.shape[1]} jacobian from {delta_w.shape[0]} "
        f"differences with {workers} worker(s)"
    )
    return JacobianMatrix(data=result, target_shape=list(target_shape or []))
