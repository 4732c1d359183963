"""Ward clustering of latent representations."""
from .cluster_def import (
    Dendrogram,
    DissimilarityMatrix,
    Merge,
    Metric,
    abs_cosine_dissimilarity,
    cluster_sizes,
    cross_similarity,
    cut_clusters,
    ward_linkage,
)
from .dot_export import render_dot, write_dot

__all__ = [
    "Dendrogram",
    "DissimilarityMatrix",
    "Merge",
    "Metric",
    "abs_cosine_dissimilarity",
    "cluster_sizes",
    "cross_similarity",
    "cut_clusters",
    "render_dot",
    "ward_linkage",
    "write_dot",
]
