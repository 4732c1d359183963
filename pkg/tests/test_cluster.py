import json

import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from linsem.core import make_rng
from linsem.core.errors import InvalidParameterError, ZeroNormError
from linsem.cluster import (
    Dendrogram,
    DissimilarityMatrix,
    Merge,
    Metric,
    abs_cosine_dissimilarity,
    cluster_sizes,
    cross_similarity,
    cut_clusters,
    render_dot,
    ward_linkage,
)
from tests.conftest import WARD_P3_SECOND_HEIGHT

THREE_LEAVES = DissimilarityMatrix(
    np.array([[0.0, 0.1, 0.9], [0.1, 0.0, 0.9], [0.9, 0.9, 0.0]])
)


def _planted_blocks(seed: int, sizes=(4, 3, 5), dim: int = 8):
    rng = make_rng(seed)
    basis = np.linalg.qr(rng.standard_normal((dim, len(sizes))))[0]
    columns, truth = [], []
    for block, size in enumerate(sizes):
        for _ in range(size):
            sign = rng.choice([-1.0, 1.0])
            columns.append(sign * (basis[:, block] + 0.01 * rng.standard_normal(dim)))
            truth.append(block)
    order = rng.permutation(len(truth))
    return np.column_stack(columns)[:, order], np.array(truth)[order]


def _same_partition(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return all(np.array_equal(a == a[i], b == b[i]) for i in range(len(a)))


def test_two_leaves() -> None:
    dist = abs_cosine_dissimilarity(np.array([[1.0, 0.6], [0.0, 0.8]]))
    dendro = ward_linkage(dist)
    assert dendro.merges == [Merge(a=0, b=1, height=pytest.approx(0.4), size=2)]


def test_three_leaves() -> None:
    dendro = ward_linkage(THREE_LEAVES)
    assert (dendro.merges[0].a, dendro.merges[0].b) == (0, 1)
    assert dendro.heights[0] == pytest.approx(0.1)
    assert (dendro.merges[1].a, dendro.merges[1].b) == (2, 3)
    assert dendro.heights[1] == pytest.approx(WARD_P3_SECOND_HEIGHT)
    assert dendro.heights[1] == pytest.approx(1.0376, abs=1e-4)
    assert dendro.merges[1].size == 3


def test_ties_go_to_the_smallest_pair() -> None:
    flat = DissimilarityMatrix(np.ones((4, 4)) - np.eye(4))
    dendro = ward_linkage(flat)
    assert (dendro.merges[0].a, dendro.merges[0].b) == (0, 1)
    assert (dendro.merges[1].a, dendro.merges[1].b) == (2, 3)


@pytest.mark.parametrize("seed", range(200))
def test_heights_match_reference_ward(seed: int) -> None:
    rng = make_rng(seed)
    p = int(rng.integers(2, 12))
    dist = abs_cosine_dissimilarity(rng.standard_normal((6, p)))
    ours = ward_linkage(dist)
    reference = linkage(squareform(dist.data, checks=False), method="ward")
    assert np.allclose(sorted(ours.heights), sorted(reference[:, 2]), atol=1e-10)
    assert [m.size for m in ours.merges][-1] == p


def _brute_force_ward(points: np.ndarray):
    """Merge leaf sets and heights from cluster centroids, scanning every pair each step."""
    clusters = {i: [i] for i in range(len(points))}
    merges = []
    next_id = len(points)
    while len(clusters) > 1:
        best = None
        for a in sorted(clusters):
            for b in sorted(clusters):
                if b <= a:
                    continue
                n_a, n_b = len(clusters[a]), len(clusters[b])
                gap = points[clusters[a]].mean(axis=0) - points[clusters[b]].mean(axis=0)
                height = np.sqrt(2 * n_a * n_b / (n_a + n_b)) * np.linalg.norm(gap)
                if best is None or height < best[0]:
                    best = (height, a, b)
        height, a, b = best
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        merges.append((frozenset(clusters[next_id]), height))
        next_id += 1
    return merges


def _leaf_sets(dendro: Dendrogram):
    members = {i: [i] for i in range(dendro.leaf_count)}
    for step, merge in enumerate(dendro.merges):
        members[dendro.leaf_count + step] = members[merge.a] + members[merge.b]
        yield frozenset(members[dendro.leaf_count + step])


@pytest.mark.parametrize("seed", range(200))
def test_merges_match_brute_force_ward(seed: int) -> None:
    rng = make_rng(seed)
    points = rng.standard_normal((int(rng.integers(3, 17)), 4))
    gaps = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    points /= gaps.max()
    ours = ward_linkage(DissimilarityMatrix(gaps / gaps.max()))
    expected = _brute_force_ward(points)
    assert list(_leaf_sets(ours)) == [leaves for leaves, _ in expected]
    assert np.allclose(ours.heights, [height for _, height in expected], atol=1e-12)


def test_heights_are_monotone() -> None:
    dist = abs_cosine_dissimilarity(make_rng(3).standard_normal((5, 15)))
    heights = ward_linkage(dist).heights
    assert all(b >= a - 1e-12 for a, b in zip(heights, heights[1:]))


@pytest.mark.parametrize("seed", range(5))
def test_planted_blocks_are_recovered(seed: int) -> None:
    vectors, truth = _planted_blocks(seed)
    similarity = cross_similarity(vectors, vectors)
    same = truth[:, None] == truth[None, :]
    assert similarity[same].min() >= 0.95
    assert similarity[~same].max() <= 0.1

    labels = cut_clusters(ward_linkage(abs_cosine_dissimilarity(vectors)), 3)
    assert _same_partition(labels, truth)
    assert sorted(cluster_sizes(labels)) == [3, 4, 5]


def test_cut_extremes() -> None:
    dendro = ward_linkage(abs_cosine_dissimilarity(make_rng(4).standard_normal((4, 6))))
    assert cut_clusters(dendro, 1) == [0] * 6
    assert cut_clusters(dendro, 6) == list(range(6))
    for k in (0, 7):
        with pytest.raises(InvalidParameterError, match="k must lie"):
            cut_clusters(dendro, k)


def test_labels_follow_first_leaf_order() -> None:
    assert cut_clusters(ward_linkage(THREE_LEAVES), 2) == [0, 0, 1]


@pytest.mark.parametrize("seed", range(10))
def test_cuts_refine_each_other(seed: int) -> None:
    rng = make_rng(seed)
    p = 9
    dendro = ward_linkage(abs_cosine_dissimilarity(rng.standard_normal((5, p))))
    for k in range(2, p + 1):
        fine = np.array(cut_clusters(dendro, k))
        coarse = np.array(cut_clusters(dendro, k - 1))
        assert len(set(fine.tolist())) == k
        for label in range(k):
            assert len(set(coarse[fine == label].tolist())) == 1


def test_metrics() -> None:
    vectors = np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]])
    abs_cos = abs_cosine_dissimilarity(vectors)
    assert abs_cos.data[0, 1] == pytest.approx(0.0)
    assert abs_cos.data[0, 2] == pytest.approx(1.0)
    assert abs_cos.metric_tag == "abs-cosine"

    one_minus = abs_cosine_dissimilarity(vectors, Metric.ABS_ONE_MINUS_COS)
    assert one_minus.data[0, 1] == pytest.approx(2.0)
    assert one_minus.data[0, 2] == pytest.approx(1.0)
    assert abs_cosine_dissimilarity(vectors, "abs-one-minus-cos").metric_tag == (
        "abs-one-minus-cos"
    )


def test_zero_vector() -> None:
    with pytest.raises(ZeroNormError):
        abs_cosine_dissimilarity(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_cross_similarity_shape() -> None:
    rng = make_rng(5)
    similarity = cross_similarity(rng.standard_normal((4, 3)), rng.standard_normal((4, 2)))
    assert similarity.shape == (3, 2)
    assert np.all((similarity >= 0) & (similarity <= 1 + 1e-12))


@pytest.mark.parametrize(
    "data, message",
    [
        (np.array([[0.0, 0.2], [0.3, 0.0]]), "symmetric"),
        (np.array([[0.1, 0.2], [0.2, 0.0]]), "zero diagonal"),
        (np.array([[0.0, -0.2], [-0.2, 0.0]]), "non-negative"),
        (np.array([[0.0, 1.5], [1.5, 0.0]]), r"\[0, 1\]"),
    ],
)
def test_dissimilarity_validation(data: np.ndarray, message: str) -> None:
    with pytest.raises(InvalidParameterError, match=message):
        DissimilarityMatrix(data)


def test_single_leaf_is_refused() -> None:
    with pytest.raises(InvalidParameterError, match="at least 2"):
        ward_linkage(DissimilarityMatrix(np.zeros((1, 1))))


def test_dendrogram_validation() -> None:
    with pytest.raises(InvalidParameterError, match="need 2 merges"):
        Dendrogram(merges=[Merge(0, 1, 0.1, 2)], leaf_count=3)
    with pytest.raises(InvalidParameterError, match="malformed"):
        Dendrogram(merges=[Merge(1, 0, 0.1, 2)], leaf_count=2)


def test_dendrogram_json(tmp_path) -> None:
    dendro = ward_linkage(THREE_LEAVES)
    labelled = Dendrogram(
        merges=dendro.merges, leaf_count=3, labels=cut_clusters(dendro, 2)
    )
    path = tmp_path / "dendrogram.json"
    labelled.save(path)

    record = json.loads(path.read_text())
    assert record["merges"][0] == [0, 1, pytest.approx(0.1), 2]
    assert record["leaf_count"] == 3
    assert record["labels"] == [0, 0, 1]
    assert Dendrogram.load(path) == labelled


def test_render_dot() -> None:
    dendro = ward_linkage(THREE_LEAVES)
    text = render_dot(dendro, names=["pose", "smile", "age"], labels=[0, 0, 1])
    assert text.startswith("graph dendrogram {")
    assert 'n0 [label="pose", group="c0", color="red"];' in text
    assert 'n2 [label="age", group="c1", color="blue"];' in text
    assert "n2 -- n4;" in text
    assert 'xlabel="1.038"' in text


def test_render_dot_without_labels() -> None:
    text = render_dot(ward_linkage(THREE_LEAVES))
    assert 'n1 [label="v1"];' in text
    assert "color" not in text


def test_cluster_sizes() -> None:
    assert cluster_sizes([0, 1, 1, 2, 2, 2]) == [1, 2, 3]
