"""Adaptive moment estimation over named numpy parameters."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from linsem.core.errors import InvalidParameterError
from linsem.core.types import FloatArray

__all__ = ["Adam"]


@dataclass
class Adam:
    """Adam with bias-corrected moments, one moment pair per named parameter.

    Parameters are updated in place. Each name keeps its own step counter so that
    alternating updates of different parameters see correct bias corrections.

    :param lr: The learning rate.
    :param beta1: Decay of the first moment.
    :param beta2: Decay of the second moment.
    :param eps: Added to the root of the second moment.
    """

    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _m: Dict[str, FloatArray] = field(default_factory=dict, init=False, repr=False)
    _v: Dict[str, FloatArray] = field(default_factory=dict, init=False, repr=False)
    _t: Dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise InvalidParameterError(f"learning rate must be positive, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise InvalidParameterError(
                f"moment decays must lie in [0, 1), got {self.beta1} and {self.beta2}"
            )
        if self.eps <= 0:
            raise InvalidParameterError(f"eps must be positive, got {self.eps}")

    def steps(self, name: str) -> int:
        """How many updates parameter ``name`` received."""
        return self._t.get(name, 0)

    def step(self, name: str, param: FloatArray, grad: FloatArray) -> None:
        """Apply one update to ``param`` in place.

        :param name: The parameter's key in the moment tables.
        :param param: The parameter array, modified in place.
        :param grad: Its gradient.
        """
        if name not in self._m:
            self._m[name] = np.zeros_like(param)
            self._v[name] = np.zeros_like(param)
            self._t[name] = 0
        self._t[name] += 1
        t = self._t[name]

        m = self._m[name]
        v = self._v[name]
        m *= self.beta1
        m += (1.0 - self.beta1) * grad
        v *= self.beta2
        v += (1.0 - self.beta2) * (grad * grad)

        m_hat = m / (1.0 - self.beta1**t)
        v_hat = v / (1.0 - self.beta2**t)
        param -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def reset(self, name: str) -> None:
        """Forget the moments of ``name``."""
        self._m.pop(name, None)
        self._v.pop(name, None)
        self._t.pop(name, None)
