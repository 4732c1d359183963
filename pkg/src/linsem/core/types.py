"""Core value types shared by every linsem module."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

from linsem.core.errors import InvalidParameterError, ShapeMismatchError

FloatArray = NDArray[np.float64]

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit unsigned seed. Identical seed and call sequence give identical streams.

    :param seed: The seed value.
    """

    seed: int

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) <= _MAX_SEED:
            raise InvalidParameterError(
                f"seed must be a 64-bit unsigned integer, got {self.seed}"
            )

    def rng(self) -> np.random.Generator:
        """Spawn a fresh generator positioned at the start of this seed's stream."""
        return np.random.Generator(np.random.PCG64(int(self.seed)))


def make_rng(seed: int | RngSeed | np.random.Generator) -> np.random.Generator:
    """Turn a seed (or an existing stream) into a random generator.

    Generators are passed through untouched so callers can share one stream.

    :param seed: An integer seed, an ``RngSeed`` or a generator.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RngSeed):
        return seed.rng()
    return RngSeed(int(seed)).rng()


def derive_rng(seed: int | RngSeed, key: int) -> np.random.Generator:
    """An independent stream for sub-task ``key`` of a seeded run.

    The stream depends only on ``(seed, key)``, not on what other keys consumed.
    """
    seed = seed if isinstance(seed, RngSeed) else RngSeed(int(seed))
    sequence = np.random.SeedSequence(int(seed.seed), spawn_key=(int(key),))
    return np.random.Generator(np.random.PCG64(sequence))


def as_matrix(data: ArrayLike, name: str = "matrix") -> FloatArray:
    """Convert to a 2-D float64 array, rejecting anything else."""
    array = np.asarray(data, dtype=np.float64)
    if array.ndim != 2:
        raise ShapeMismatchError(f"{name} must be 2-D, got shape {array.shape}")
    return array


def as_vector(data: ArrayLike, name: str = "vector") -> FloatArray:
    """Convert to a 1-D float64 array, rejecting anything else."""
    array = np.asarray(data, dtype=np.float64)
    if array.ndim != 1:
        raise ShapeMismatchError(f"{name} must be 1-D, got shape {array.shape}")
    return array


@dataclass(frozen=True)
class LatentBatch:
    """An N×d batch of latent codes, one sample per row.

    :param data: The N×d matrix of latent codes.
    """

    data: FloatArray

    def __post_init__(self) -> None:
        data = as_matrix(self.data, "latent batch")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ShapeMismatchError(
                f"latent batch needs at least one row and one column, got {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise InvalidParameterError("latent batch contains non-finite entries")
        data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, data: ArrayLike) -> Self:
        """Build a batch from anything array-like."""
        return cls(np.asarray(data, dtype=np.float64))

    @property
    def n_samples(self) -> int:
        """The number of samples N."""
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        """The latent dimension d."""
        return self.data.shape[1]


@dataclass(frozen=True)
class BatchStats:
    """Mean, unbiased variance and Pearson correlation of a latent batch.

    :param mean: The d-vector of column means.
    :param variance: The d-vector of unbiased (N-1) column variances.
    :param correlation: The d×d Pearson correlation matrix.
    :param covariance: The d×d unbiased covariance matrix.
    """

    mean: FloatArray
    variance: FloatArray
    correlation: FloatArray
    covariance: FloatArray

    @property
    def std(self) -> FloatArray:
        """Column standard deviations."""
        return np.sqrt(self.variance)
