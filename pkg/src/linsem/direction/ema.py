"""Exponential moving average of a manipulation direction and its refit schedule."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Deque, Tuple

import numpy as np
from numpy.typing import ArrayLike

from linsem.core.errors import InvalidParameterError, ShapeMismatchError, ZeroNormError
from linsem.core.types import FloatArray, as_matrix, as_vector
from linsem.direction.direction_def import DifferenceSet, DirectionVector, fit_direction

__all__ = [
    "DEFAULT_MOMENTUM",
    "DEFAULT_UPDATE_INTERVAL",
    "DirectionTracker",
    "EmaDirection",
    "ema_update",
]

_ema_logger = logging.getLogger("linsem.direction.ema")

DEFAULT_MOMENTUM = 0.995
DEFAULT_UPDATE_INTERVAL = 10


@dataclass(frozen=True)
class EmaDirection:
    """The smoothed direction. Single writer: updates must be serialized by the caller.

    :param v_ema: The current unit direction, ``None`` before the first update.
    :param momentum: The weight kept on the history, in (0, 1).
    :param update_interval: How many training steps pass between refits.
    :param step_counter: How many updates have been applied.
    """

    v_ema: FloatArray | None = None
    momentum: float = DEFAULT_MOMENTUM
    update_interval: int = DEFAULT_UPDATE_INTERVAL
    step_counter: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.momentum < 1.0:
            raise InvalidParameterError(
                f"momentum must lie in (0, 1), got {self.momentum}"
            )
        if self.update_interval < 1:
            raise InvalidParameterError(
                f"update_interval must be positive, got {self.update_interval}"
            )

    @property
    def initialized(self) -> bool:
        return self.v_ema is not None


def ema_update(state: EmaDirection, new_v: ArrayLike) -> EmaDirection:
    """Blend a fresh direction estimate into the moving average.

    The estimate is sign-aligned to the running direction before averaging, since
    directions are only defined up to sign. The first update adopts it as is.

    :param state: The current state.
    :param new_v: The fresh unit-length estimate.
    :raises ZeroNormError: If ``new_v`` is zero.
    """
    new_v = as_vector(new_v, "direction estimate")
    norm = np.linalg.norm(new_v)
    if norm == 0:
        raise ZeroNormError("direction estimate")
    new_v = new_v / norm

    if state.v_ema is None:
        return replace(state, v_ema=new_v, step_counter=state.step_counter + 1)

    if new_v.shape != state.v_ema.shape:
        raise ShapeMismatchError(
            f"estimate has dimension {new_v.shape[0]}, average {state.v_ema.shape[0]}"
        )
    if new_v @ state.v_ema < 0:
        new_v = -new_v

    blended = state.momentum * state.v_ema + (1.0 - state.momentum) * new_v
    return replace(
        state,
        v_ema=blended / np.linalg.norm(blended),
        step_counter=state.step_counter + 1,
    )


@dataclass
class DirectionTracker:
    """Keeps a buffer of fresh difference pairs and refits the EMA on schedule.

    Every ``update_interval`` calls to :meth:`step` the direction is re-fitted from
    the freshest ``buffer_size`` pairs and blended into the moving average.

    :param state: The moving-average state.
    :param buffer_size: How many of the most recent difference rows to refit from.
    :param ridge: The ridge passed to the refit.
    """

    state: EmaDirection = field(default_factory=EmaDirection)
    buffer_size: int = 4096
    ridge: float = 0.0
    _steps: int = field(default=0, init=False)
    _buffer: Deque[Tuple[FloatArray, float]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._buffer = deque(maxlen=self.buffer_size)
        self._logger = _ema_logger.getChild(f"DirectionTracker_{id(self):x}")

    @property
    def steps(self) -> int:
        """How many training steps were recorded."""
        return self._steps

    @property
    def buffered(self) -> int:
        return len(self._buffer)

    def step(self, delta_w: ArrayLike, delta_y: ArrayLike) -> bool:
        """Record one training step's difference pairs, refitting if it is due.

        :param delta_w: The step's M×d latent differences.
        :param delta_y: The step's M semantic differences.
        :return: Whether the moving average was updated.
        """
        delta_w = as_matrix(delta_w, "delta_w")
        delta_y = as_vector(delta_y, "delta_y")
        if delta_w.shape[0] != delta_y.shape[0]:
            raise ShapeMismatchError(
                f"delta_w has {delta_w.shape[0]} rows but delta_y has {delta_y.shape[0]}"
            )
        self._buffer.extend(zip(delta_w, delta_y.tolist()))
        self._steps += 1

        if self._steps % self.state.update_interval != 0:
            return False

        rows, values = zip(*self._buffer)
        diffs = DifferenceSet(delta_w=np.stack(rows), delta_y=np.array(values))
        fresh = fit_direction(diffs, ridge=self.ridge)
        self.state = ema_update(self.state, fresh.v)
        self._logger.debug(
            f"Refitted at step {self._steps} from {diffs.n_samples} pairs "
            f"(update {self.state.step_counter})"
        )
        return True

    def current(self, sigma_w: float = 0.0) -> DirectionVector:
        """The current moving-average direction.

        :raises InvalidParameterError: If no refit happened yet.
        """
        if self.state.v_ema is None:
            raise InvalidParameterError("the tracker has not been updated yet")
        return DirectionVector(v=self.state.v_ema, sigma_w=sigma_w, sigma_set=sigma_w > 0)
