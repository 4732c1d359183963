"""The decorrelation regularizer: loss and analytic batch gradient."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
from dataclasses_json import dataclass_json

from linsem.core.errors import InsufficientSamplesError
from linsem.core.latent import correlation_from_covariance
from linsem.core.types import FloatArray, LatentBatch

__all__ = [
    "CLAMP_DELTA",
    "DecorrLoss",
    "VarianceTerm",
    "decorr_grad",
    "decorr_loss",
]

_decorr_logger = logging.getLogger("linsem.decorr")

CLAMP_DELTA = 1e-7


class VarianceTerm(enum.Enum):
    """How each variance is compared against the others in the variance penalty."""

    MEAN = "mean"
    SUM = "sum"


@dataclass_json
@dataclass(frozen=True)
class DecorrLoss:
    """The decorrelation loss and its parts.

    :param total: ``corr_term + var_term``.
    :param corr_term: ``-Σ_{i≠j} log(1 - |ρ_ij|)`` over ordered pairs.
    :param var_term: The variance-equalization penalty.
    :param clamp_count: How many ordered pairs had ``|ρ_ij|`` clamped to ``1 - δ``.
    """

    total: float
    corr_term: float
    var_term: float
    clamp_count: int


@dataclass(frozen=True)
class _Moments:
    centered: FloatArray
    covariance: FloatArray
    variance: FloatArray
    correlation: FloatArray


def _moments(batch: LatentBatch) -> _Moments:
    if batch.n_samples < 2:
        raise InsufficientSamplesError(2, batch.n_samples)

    centered = batch.data - batch.data.mean(axis=0)
    covariance = centered.T @ centered / (batch.n_samples - 1)
    covariance = (covariance + covariance.T) / 2
    variance = np.maximum(np.diag(covariance).copy(), 0.0)
    return _Moments(
        centered=centered,
        covariance=covariance,
        variance=variance,
        correlation=correlation_from_covariance(covariance),
    )


def _variance_reference(variance: FloatArray, variance_term: VarianceTerm) -> float:
    match variance_term:
        case VarianceTerm.MEAN:
            return float(variance.mean())
        case VarianceTerm.SUM:
            return float(variance.sum())


def decorr_loss(
    batch: LatentBatch, variance_term: VarianceTerm = VarianceTerm.MEAN
) -> DecorrLoss:
    """Evaluate the decorrelation loss of a batch.

    :param batch: The latent batch, N >= 2.
    :param variance_term: Compare each variance against the mean (default) or the sum.
    :raises InsufficientSamplesError: If N < 2.
    """
    moments = _moments(batch)
    d = batch.dim

    off_diagonal = ~np.eye(d, dtype=bool)
    abs_rho = np.abs(moments.correlation)[off_diagonal]
    clamped = abs_rho > 1.0 - CLAMP_DELTA
    corr_term = float(-np.sum(np.log1p(-np.minimum(abs_rho, 1.0 - CLAMP_DELTA))))

    reference = _variance_reference(moments.variance, variance_term)
    var_term = float(np.sum((moments.variance - reference) ** 2))

    loss = DecorrLoss(
        total=corr_term + var_term,
        corr_term=corr_term,
        var_term=var_term,
        clamp_count=int(np.sum(clamped)),
    )
    _decorr_logger.debug(f"Decorrelation loss of {batch.n_samples}x{d} batch: {loss}")
    return loss


def decorr_grad(
    batch: LatentBatch, variance_term: VarianceTerm = VarianceTerm.MEAN
) -> FloatArray:
    """Analytic gradient of ``decorr_loss(batch).total`` with respect to every entry.

    Clamped pairs and pairs with ``ρ = 0`` contribute nothing; zero-variance columns
    contribute only through the variance penalty.

    :param batch: The latent batch, N >= 2.
    :param variance_term: Must match the one used for the loss.
    :raises InsufficientSamplesError: If N < 2.
    """
    moments = _moments(batch)
    d = batch.dim
    variance = moments.variance
    rho = moments.correlation
    live = variance > 0

    # dL/dρ_ij for every ordered pair
    abs_rho = np.abs(rho)
    active = (abs_rho <= 1.0 - CLAMP_DELTA) & np.outer(live, live)
    np.fill_diagonal(active, False)
    d_rho = np.zeros((d, d))
    d_rho[active] = np.sign(rho[active]) / (1.0 - abs_rho[active])

    safe_variance = np.where(live, variance, 1.0)
    std = np.sqrt(safe_variance)

    # dL/dC, treating every covariance entry as independent
    d_cov = d_rho / np.outer(std, std)
    weighted = d_rho * rho
    d_cov[np.diag_indices(d)] = -(weighted.sum(axis=1) + weighted.sum(axis=0)) / (
        2.0 * safe_variance
    )

    reference = _variance_reference(variance, variance_term)
    match variance_term:
        case VarianceTerm.MEAN:
            d_var = 2.0 * (variance - reference)
        case VarianceTerm.SUM:
            d_var = 2.0 * (variance - reference) + 2.0 * (d - 1) * reference
    d_cov[np.diag_indices(d)] += d_var

    return moments.centered @ (d_cov + d_cov.T) / (batch.n_samples - 1)
