"""Central finite differences for checking analytic gradients."""
from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from linsem.core.types import FloatArray

__all__ = ["central_differences", "max_relative_error"]

_gradcheck_logger = logging.getLogger("linsem.core.gradcheck")


def central_differences(
    func: Callable[[FloatArray], float], x: FloatArray, h: float = 1e-5
) -> FloatArray:
    """Gradient of a scalar function by central differences, entry by entry.

    :param func: The scalar function of an array.
    :param x: The point to differentiate at. It is not modified.
    :param h: The step size.
    """
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    flat_grad = grad.reshape(-1)

    for j in range(flat.size):
        original = flat[j]

        flat[j] = original + h
        f_plus = func(x)

        flat[j] = original - h
        f_minus = func(x)

        flat[j] = original
        flat_grad[j] = (f_plus - f_minus) / (2 * h)

    _gradcheck_logger.debug(f"Finite differences over {flat.size} entries")
    return grad


def max_relative_error(analytic: FloatArray, numeric: FloatArray) -> float:
    """Largest entry-wise deviation, relative to the largest numeric gradient entry.

    Returns the absolute deviation when the numeric gradient vanishes.
    """
    deviation = float(np.max(np.abs(analytic - numeric), initial=0.0))
    scale = float(np.max(np.abs(numeric), initial=0.0))
    return deviation / scale if scale > 0 else deviation
