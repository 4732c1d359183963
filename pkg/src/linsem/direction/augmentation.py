"""Extrapolation-based augmentation along a manipulation direction."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from linsem.core.errors import InvalidParameterError
from linsem.core.types import FloatArray, LatentBatch, RngSeed, make_rng
from linsem.direction.direction_def import DirectionVector

__all__ = ["ScaleBounds", "augment_batch", "augmentation_scale"]

_augmentation_logger = logging.getLogger("linsem.direction.augmentation")


@dataclass(frozen=True)
class ScaleBounds:
    """The closed interval augmentation scales are drawn from.

    :param low: The lower bound.
    :param high: The upper bound.
    """

    low: float = -10.0
    high: float = 10.0

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise InvalidParameterError(
                f"scale bounds are reversed: [{self.low}, {self.high}]"
            )


def augmentation_scale(
    rng: np.random.Generator | RngSeed | int, bounds: ScaleBounds = ScaleBounds()
) -> float:
    """Draw one extrapolation scale uniformly from the bounds.

    :param rng: The random stream.
    :param bounds: The interval, ``[-10, 10]`` by default.
    """
    if bounds.low == bounds.high:
        return float(bounds.low)
    return float(make_rng(rng).uniform(bounds.low, bounds.high))


def augment_batch(
    batch: LatentBatch,
    direction: DirectionVector,
    rng: np.random.Generator | RngSeed | int,
    bounds: ScaleBounds = ScaleBounds(),
) -> tuple[FloatArray, FloatArray]:
    """Push every latent code of a batch to a random scale along the direction.

    :param batch: The latent codes to augment.
    :param direction: The manipulation direction with ``sigma_w`` attached.
    :param rng: The random stream.
    :param bounds: The interval scales are drawn from.
    :return: The augmented N×d codes and the N scales used.
    """
    stream = make_rng(rng)
    scales = np.array([augmentation_scale(stream, bounds) for _ in range(batch.n_samples)])
    if not direction.sigma_set:
        _augmentation_logger.warning(
            "Augmenting along a direction whose sigma_w was never attached"
        )
    v = direction.v
    projections = batch.data @ v
    augmented = batch.data + np.outer(scales * direction.sigma_w - projections, v)
    _augmentation_logger.debug(
        f"Augmented {batch.n_samples} codes with scales in [{bounds.low}, {bounds.high}]"
    )
    return augmented, scales
