"""Deterministic latent sampling and batch statistics."""
from __future__ import annotations

import logging

import numpy as np

from linsem.core.errors import InsufficientSamplesError, InvalidParameterError
from linsem.core.types import BatchStats, FloatArray, LatentBatch, RngSeed, make_rng

__all__ = ["sample_gaussian", "batch_stats", "correlation_from_covariance"]

_latent_logger = logging.getLogger("linsem.core.latent")


def sample_gaussian(
    n: int, d: int, seed: int | RngSeed | np.random.Generator
) -> LatentBatch:
    """Draw an n×d batch of i.i.d. standard normal latent codes.

    :param n: The number of samples.
    :param d: The latent dimension.
    :param seed: The seed or stream to draw from.
    """
    if n < 1 or d < 1:
        raise InvalidParameterError(f"n and d must be positive, got n={n}, d={d}")

    data = make_rng(seed).standard_normal((n, d))
    _latent_logger.debug(f"Sampled {n}x{d} gaussian batch")
    return LatentBatch(data)


def correlation_from_covariance(covariance: FloatArray) -> FloatArray:
    """Pearson correlation from a covariance matrix.

    A zero-variance column gets correlation 0 with every other column and 1 with itself.
    """
    variance = np.diag(covariance).copy()
    live = variance > 0
    std = np.sqrt(np.where(live, variance, 1.0))

    correlation = covariance / np.outer(std, std)
    correlation[~live, :] = 0.0
    correlation[:, ~live] = 0.0
    np.clip(correlation, -1.0, 1.0, out=correlation)
    correlation = (correlation + correlation.T) / 2
    np.fill_diagonal(correlation, 1.0)
    return correlation


def batch_stats(batch: LatentBatch) -> BatchStats:
    """Mean, unbiased variance and Pearson correlation of a batch.

    :param batch: The batch, with at least two rows.
    :raises InsufficientSamplesError: If the batch has fewer than two rows.
    """
    if batch.n_samples < 2:
        raise InsufficientSamplesError(2, batch.n_samples)

    data = batch.data
    mean = data.mean(axis=0)
    centered = data - mean
    covariance = centered.T @ centered / (batch.n_samples - 1)
    covariance = (covariance + covariance.T) / 2
    variance = np.maximum(np.diag(covariance).copy(), 0.0)

    return BatchStats(
        mean=mean,
        variance=variance,
        correlation=correlation_from_covariance(covariance),
        covariance=covariance,
    )
