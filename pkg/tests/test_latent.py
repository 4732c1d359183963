import numpy as np
import pytest

from linsem.core import LatentBatch, RngSeed, batch_stats, derive_rng, make_rng, sample_gaussian
from linsem.core.errors import (
    InsufficientSamplesError,
    InvalidParameterError,
    RankDeficientError,
    ShapeMismatchError,
    ZeroNormError,
)
from linsem.core.gradcheck import central_differences, max_relative_error
from linsem.core.hashing import fnv1a_64, hash_file
from linsem.core.linalg import (
    NormalEquationSolver,
    abs_cosine_matrix,
    normalize_columns,
)
from tests.conftest import random_batch


def test_sample_gaussian_is_deterministic() -> None:
    first = sample_gaussian(4, 3, 7)
    second = sample_gaussian(4, 3, 7)
    assert first.data.shape == (4, 3)
    assert first.data.tobytes() == second.data.tobytes()


def test_sample_gaussian_distinct_seeds_differ() -> None:
    assert not np.array_equal(sample_gaussian(5, 2, 1).data, sample_gaussian(5, 2, 2).data)


def test_sample_gaussian_single_entry() -> None:
    batch = sample_gaussian(1, 1, 3)
    assert batch.data.shape == (1, 1)
    assert np.isfinite(batch.data).all()


def test_sample_gaussian_moments() -> None:
    stats = batch_stats(sample_gaussian(100_000, 2, 1))
    assert np.all(np.abs(stats.mean) < 0.02)
    assert np.all(np.abs(stats.variance - 1) < 0.03)


@pytest.mark.parametrize("n, d", [(0, 3), (3, 0)])
def test_sample_gaussian_rejects_empty(n: int, d: int) -> None:
    with pytest.raises(InvalidParameterError):
        sample_gaussian(n, d, 0)


def test_rng_seed_range() -> None:
    RngSeed(2**64 - 1)
    with pytest.raises(InvalidParameterError, match="64-bit"):
        RngSeed(-1)
    with pytest.raises(InvalidParameterError, match="64-bit"):
        RngSeed(2**64)


def test_make_rng_passes_generators_through() -> None:
    stream = make_rng(5)
    assert make_rng(stream) is stream
    assert make_rng(RngSeed(5)).random() == make_rng(5).random()


def test_derive_rng_streams_are_independent_of_order() -> None:
    a_first = derive_rng(11, 2).random(3)
    derive_rng(11, 1).random(100)
    assert np.array_equal(derive_rng(11, 2).random(3), a_first)
    assert not np.array_equal(derive_rng(11, 1).random(3), a_first)


def test_latent_batch_validation() -> None:
    with pytest.raises(ShapeMismatchError):
        LatentBatch(np.zeros(3))
    with pytest.raises(InvalidParameterError, match="non-finite"):
        LatentBatch(np.array([[1.0, np.nan]]))
    batch = LatentBatch.from_array([[1, 2], [3, 4]])
    assert (batch.n_samples, batch.dim) == (2, 2)
    assert not batch.data.flags.writeable


def test_batch_stats_hand_example() -> None:
    stats = batch_stats(LatentBatch(np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float)))
    assert np.allclose(stats.mean, [0, 0])
    assert np.allclose(stats.variance, [4 / 3, 4 / 3])
    assert stats.correlation[0, 1] == pytest.approx(0.0)
    assert np.allclose(stats.std, np.sqrt(4 / 3))


def test_batch_stats_single_dimension() -> None:
    stats = batch_stats(LatentBatch(np.array([[1.0], [2.0], [5.0]])))
    assert stats.correlation.tolist() == [[1.0]]


def test_batch_stats_linear_dependence() -> None:
    stats = batch_stats(LatentBatch(np.array([[1, 2], [2, 4], [3, 6]], float)))
    assert stats.correlation[0, 1] == pytest.approx(1.0)


def test_batch_stats_zero_variance_column() -> None:
    stats = batch_stats(LatentBatch(np.array([[1.0, 4.0], [2.0, 4.0], [3.0, 4.0]])))
    assert stats.correlation.tolist() == [[1.0, 0.0], [0.0, 1.0]]
    assert stats.variance[1] == 0.0


def test_batch_stats_needs_two_rows() -> None:
    with pytest.raises(InsufficientSamplesError, match="insufficient samples"):
        batch_stats(LatentBatch(np.array([[1.0, 2.0]])))


def test_batch_stats_row_permutation_invariance() -> None:
    batch = random_batch(20, 4, seed=2)
    shuffled = LatentBatch(make_rng(9).permutation(batch.data))
    original, permuted = batch_stats(batch), batch_stats(shuffled)
    assert np.allclose(original.mean, permuted.mean)
    assert np.allclose(original.variance, permuted.variance)
    assert np.allclose(original.correlation, permuted.correlation)


@pytest.mark.parametrize("seed", range(5))
def test_batch_stats_unit_diagonal(seed: int) -> None:
    stats = batch_stats(random_batch(10, 5, seed))
    assert np.allclose(np.diag(stats.correlation), 1.0)
    assert np.all(np.abs(stats.correlation) <= 1.0)


def test_normal_equation_solver_hand_example() -> None:
    design = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    solver = NormalEquationSolver.factorize(design)
    assert np.allclose(solver.solve(np.array([1.0, 2.0, 3.0])), [1.0, 2.0])
    assert solver.dim == 2


def test_normal_equation_solver_rank_deficient() -> None:
    design = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    with pytest.raises(RankDeficientError, match="supply ridge"):
        NormalEquationSolver.factorize(design)
    ridged = NormalEquationSolver.factorize(design, ridge=1e-3)
    assert np.all(np.isfinite(ridged.solve(np.array([1.0, 2.0, 3.0]))))


def test_normal_equation_solver_needs_more_rows_than_columns() -> None:
    with pytest.raises(RankDeficientError, match="rank-deficient system, supply ridge") as exc_info:
        NormalEquationSolver.factorize(np.eye(2))
    assert exc_info.value.samples == 2
    assert exc_info.value.dim == 2
    assert NormalEquationSolver.factorize(np.eye(2), ridge=0.1).dim == 2
    with pytest.raises(InvalidParameterError, match="non-negative"):
        NormalEquationSolver.factorize(np.ones((3, 2)), ridge=-1.0)


def test_normalize_columns_rejects_zero() -> None:
    with pytest.raises(ZeroNormError) as exc_info:
        normalize_columns(np.array([[1.0, 0.0], [1.0, 0.0]]), "direction")
    assert exc_info.value.indices == [1]
    assert np.allclose(np.linalg.norm(normalize_columns(np.ones((3, 2))), axis=0), 1.0)


def test_abs_cosine_matrix() -> None:
    a = np.array([[1.0, 0.0], [0.0, 2.0]])
    b = np.array([[-3.0], [0.0]])
    assert np.allclose(abs_cosine_matrix(a, b), [[1.0], [0.0]])
    with pytest.raises(ShapeMismatchError):
        abs_cosine_matrix(a, np.ones((3, 1)))


@pytest.mark.parametrize(
    "data, expected",
    [
        (b"", 0xCBF29CE484222325),
        (b"a", 0xAF63DC4C8601EC8C),
        (b"foobar", 0x85944171F73967E8),
    ],
)
def test_fnv1a_64_reference_values(data: bytes, expected: int) -> None:
    assert fnv1a_64(data) == expected


def test_hash_file(tmp_path) -> None:
    path = tmp_path / "data.txt"
    path.write_bytes(b"foobar")
    assert hash_file(path) == "85944171f73967e8"


def test_central_differences_quadratic() -> None:
    x = np.array([[1.0, -2.0], [0.5, 3.0]])
    numeric = central_differences(lambda m: float(np.sum(m**2)), x)
    assert max_relative_error(2 * x, numeric) < 1e-8
    assert x.tolist() == [[1.0, -2.0], [0.5, 3.0]]


def test_max_relative_error_zero_gradient() -> None:
    assert max_relative_error(np.array([1e-3]), np.zeros(1)) == pytest.approx(1e-3)
