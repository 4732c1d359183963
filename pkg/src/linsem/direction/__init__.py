"""Semantic direction regression, manipulation, EMA tracking and augmentation."""
from .augmentation import ScaleBounds, augment_batch, augmentation_scale
from .direction_def import (
    DifferenceSet,
    DirectionVector,
    attach_sigma,
    fit_direction,
    fit_directions,
    make_differences,
    manipulate,
    traverse,
)
from .ema import DirectionTracker, EmaDirection, ema_update

__all__ = [
    "DifferenceSet",
    "DirectionTracker",
    "DirectionVector",
    "EmaDirection",
    "ScaleBounds",
    "attach_sigma",
    "augment_batch",
    "augmentation_scale",
    "ema_update",
    "fit_direction",
    "fit_directions",
    "make_differences",
    "manipulate",
    "traverse",
]
