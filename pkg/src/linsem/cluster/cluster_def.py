"""Ward agglomerative clustering of latent representations over |cos| dissimilarity."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Self

import numpy as np
from dataclasses_json import config, dataclass_json
from numpy.typing import ArrayLike

from linsem.core.errors import InvalidParameterError, ShapeMismatchError
from linsem.core.linalg import abs_cosine_matrix, normalize_columns
from linsem.core.types import FloatArray, as_matrix

__all__ = [
    "Dendrogram",
    "DissimilarityMatrix",
    "Merge",
    "Metric",
    "abs_cosine_dissimilarity",
    "cluster_sizes",
    "cross_similarity",
    "cut_clusters",
    "ward_linkage",
]

_cluster_logger = logging.getLogger("linsem.cluster")

_SYMMETRY_TOLERANCE = 1e-12


class Metric(enum.Enum):
    """Dissimilarity between two latent representations."""

    ABS_COSINE = "abs-cosine"
    ABS_ONE_MINUS_COS = "abs-one-minus-cos"


@dataclass(frozen=True)
class DissimilarityMatrix:
    """A symmetric P×P dissimilarity with zero diagonal.

    :param data: The matrix.
    :param metric_tag: Which metric produced it.
    """

    data: FloatArray
    metric_tag: str = Metric.ABS_COSINE.value

    def __post_init__(self) -> None:
        data = as_matrix(self.data, "dissimilarity")
        if data.shape[0] != data.shape[1]:
            raise ShapeMismatchError(f"dissimilarity must be square, got {data.shape}")
        if not np.all(np.isfinite(data)) or np.any(data < 0):
            raise InvalidParameterError("dissimilarities must be finite and non-negative")
        if np.max(np.abs(data - data.T), initial=0.0) > _SYMMETRY_TOLERANCE:
            raise InvalidParameterError("dissimilarity matrix is not symmetric")
        if np.any(np.diag(data) != 0):
            raise InvalidParameterError("dissimilarity matrix needs a zero diagonal")
        if self.metric_tag == Metric.ABS_COSINE.value and np.any(data > 1.0):
            raise InvalidParameterError("abs-cosine dissimilarities must lie in [0, 1]")
        object.__setattr__(self, "data", data)

    @property
    def size(self) -> int:
        return self.data.shape[0]


def abs_cosine_dissimilarity(
    vectors: ArrayLike, metric: Metric | str = Metric.ABS_COSINE
) -> DissimilarityMatrix:
    """Pairwise dissimilarity of the columns of a d×P matrix.

    ``abs-cosine`` gives ``1 - |cos|``, invariant under column sign flips.
    ``abs-one-minus-cos`` gives ``|1 - cos|``.

    :param vectors: The d×P column vectors.
    :param metric: The metric.
    :raises ZeroNormError: If a column is zero.
    """
    metric = Metric(metric)
    unit = normalize_columns(as_matrix(vectors, "vectors"), "vector")
    cosine = np.clip(unit.T @ unit, -1.0, 1.0)
    cosine = (cosine + cosine.T) / 2
    match metric:
        case Metric.ABS_COSINE:
            data = 1.0 - np.abs(cosine)
        case Metric.ABS_ONE_MINUS_COS:
            data = np.abs(1.0 - cosine)
    data = np.maximum(data, 0.0)
    np.fill_diagonal(data, 0.0)
    return DissimilarityMatrix(data=data, metric_tag=metric.value)


def cross_similarity(a: ArrayLike, b: ArrayLike) -> FloatArray:
    """``|cos|`` between every column of ``a`` (d×P) and of ``b`` (d×Q), as P×Q.

    :raises ZeroNormError: If a column is zero.
    """
    return abs_cosine_matrix(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


@dataclass(frozen=True)
class Merge:
    """Clusters ``a < b`` joined at ``height`` into a cluster of ``size`` leaves."""

    a: int
    b: int
    height: float
    size: int


def _merges_field() -> object:
    return field(
        metadata=config(
            encoder=lambda merges: [[m.a, m.b, m.height, m.size] for m in merges],
            decoder=lambda rows: [
                Merge(int(a), int(b), float(h), int(s)) for a, b, h, s in rows
            ],
        )
    )


@dataclass_json
@dataclass(frozen=True)
class Dendrogram:
    """The merge history of an agglomerative clustering.

    Leaves are ids ``0..P-1``; the cluster formed by merge ``t`` gets id ``P + t``.

    :param merges: The ``P - 1`` merges in order.
    :param leaf_count: P.
    :param labels: Optional per-leaf cluster labels from a cut.
    """

    merges: List[Merge] = _merges_field()  # type: ignore[assignment]
    leaf_count: int
    labels: List[int] | None = None

    def __post_init__(self) -> None:
        if len(self.merges) != self.leaf_count - 1:
            raise InvalidParameterError(
                f"{self.leaf_count} leaves need {self.leaf_count - 1} merges, "
                f"got {len(self.merges)}"
            )
        for step, merge in enumerate(self.merges):
            new_id = self.leaf_count + step
            if not 0 <= merge.a < merge.b < new_id or merge.height < 0:
                raise InvalidParameterError(f"malformed merge {step}: {merge}")

    @property
    def heights(self) -> List[float]:
        return [merge.height for merge in self.merges]

    @classmethod
    def load(cls, path: Path) -> Self:
        return cls.from_json(Path(path).read_text(encoding="utf-8"))  # type: ignore

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(indent=2) + "\n", encoding="utf-8")  # type: ignore


def ward_linkage(dist: DissimilarityMatrix) -> Dendrogram:
    """Ward agglomeration through the Lance–Williams recurrence.

    Each step merges the closest pair of active clusters; ties go to the smallest
    ``(a, b)`` pair. The distance from cluster ``k`` to the merged ``i ∪ j`` is
    ``sqrt(((n_i+n_k)d²(k,i) + (n_j+n_k)d²(k,j) - n_k d²(i,j)) / (n_i+n_j+n_k))``.

    :param dist: The leaf dissimilarities, P >= 2.
    :raises InvalidParameterError: If P < 2.
    """
    leaf_count = dist.size
    if leaf_count < 2:
        raise InvalidParameterError(f"ward linkage needs at least 2 leaves, got {leaf_count}")

    total = 2 * leaf_count - 1
    distance = np.full((total, total), np.inf)
    distance[:leaf_count, :leaf_count] = dist.data
    sizes = np.zeros(total, dtype=np.int64)
    sizes[:leaf_count] = 1
    active = list(range(leaf_count))
    merges: List[Merge] = []

    for step in range(leaf_count - 1):
        ids = np.array(active)
        block = distance[np.ix_(ids, ids)]
        block[np.tril_indices(len(ids))] = np.inf
        row, col = np.unravel_index(np.argmin(block), block.shape)
        a, b = int(ids[row]), int(ids[col])
        height = float(distance[a, b])
        new_id = leaf_count + step
        n_a, n_b = sizes[a], sizes[b]

        others = ids[(ids != a) & (ids != b)]
        n_k = sizes[others]
        squared = (
            (n_a + n_k) * distance[others, a] ** 2
            + (n_b + n_k) * distance[others, b] ** 2
            - n_k * height**2
        ) / (n_a + n_b + n_k)
        updated = np.sqrt(np.maximum(squared, 0.0))
        distance[others, new_id] = updated
        distance[new_id, others] = updated
        distance[new_id, new_id] = 0.0

        sizes[new_id] = n_a + n_b
        active = [k for k in active if k not in (a, b)] + [new_id]
        merges.append(Merge(a=a, b=b, height=height, size=int(sizes[new_id])))

    _cluster_logger.debug(
        f"Ward linkage over {leaf_count} leaves, final height {merges[-1].height:.4g}"
    )
    return Dendrogram(merges=merges, leaf_count=leaf_count)


def cut_clusters(dendro: Dendrogram, k: int) -> List[int]:
    """Leaf labels after undoing the last ``k - 1`` merges.

    Labels run ``0..k-1`` in order of each cluster's first leaf.

    :param dendro: The dendrogram.
    :param k: The number of clusters, ``1 <= k <= P``.
    :raises InvalidParameterError: If ``k`` is out of range.
    """
    leaf_count = dendro.leaf_count
    if not 1 <= k <= leaf_count:
        raise InvalidParameterError(f"k must lie in [1, {leaf_count}], got {k}")

    parent = list(range(2 * leaf_count - 1))

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for step, merge in enumerate(dendro.merges[: leaf_count - k]):
        new_id = leaf_count + step
        parent[find(merge.a)] = new_id
        parent[find(merge.b)] = new_id

    labels: List[int] = []
    seen: dict[int, int] = {}
    for leaf in range(leaf_count):
        root = find(leaf)
        labels.append(seen.setdefault(root, len(seen)))
    return labels


def cluster_sizes(labels: ArrayLike) -> List[int]:
    """How many leaves carry each label ``0..max(labels)``."""
    counts = np.bincount(np.asarray(labels, dtype=np.int64))
    return counts.tolist()
