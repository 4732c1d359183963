"""Core types, sampling, statistics, linear algebra and matrix I/O."""
from .latent import batch_stats, sample_gaussian
from .types import BatchStats, LatentBatch, RngSeed, derive_rng, make_rng

__all__ = [
    "BatchStats",
    "LatentBatch",
    "RngSeed",
    "batch_stats",
    "derive_rng",
    "make_rng",
    "sample_gaussian",
]
