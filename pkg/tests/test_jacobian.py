import numpy as np
import pytest

from linsem.core import make_rng
from linsem.core.errors import (
    InvalidParameterError,
    RankDeficientError,
    ShapeMismatchError,
)
from linsem.direction import DifferenceSet, fit_direction
from linsem.jacobian import CHUNK_COLUMNS, JacobianMatrix, build_jacobian
from linsem.oracle import OracleWorld, sample_canonical_differences


def test_exact_linear_map_is_recovered(rng: np.random.Generator) -> None:
    m = rng.standard_normal((12, 5))
    delta_w = rng.standard_normal((40, 5))
    j = build_jacobian(delta_w, delta_w @ m.T)
    assert np.allclose(j.data, m, atol=1e-10)
    assert (j.n_targets, j.dim) == (12, 5)
    assert j.target_shape == [12]


def test_single_target_matches_fit_direction(rng: np.random.Generator) -> None:
    delta_w = rng.standard_normal((30, 4))
    delta_y = delta_w @ np.array([1.0, -2.0, 0.5, 3.0]) + 0.1 * rng.standard_normal(30)
    j = build_jacobian(delta_w, delta_y[:, None])
    direction = fit_direction(DifferenceSet(delta_w, delta_y))
    assert np.allclose(j.data[0], direction.v_raw)


def test_columns_are_solved_independently(rng: np.random.Generator) -> None:
    delta_w = rng.standard_normal((50, 6))
    y_a = rng.standard_normal((50, 3))
    y_b = rng.standard_normal((50, 2))
    joint = build_jacobian(delta_w, np.hstack([y_a, y_b]))
    stacked = np.vstack([build_jacobian(delta_w, y_a).data, build_jacobian(delta_w, y_b).data])
    assert np.allclose(joint.data, stacked, atol=1e-12)


def test_worker_count_does_not_change_the_result(rng: np.random.Generator) -> None:
    delta_w = rng.standard_normal((64, 8))
    targets = rng.standard_normal((64, 3 * CHUNK_COLUMNS + 17))
    single = build_jacobian(delta_w, targets, workers=1)
    pooled = build_jacobian(delta_w, targets, workers=4)
    assert single.data.tobytes() == pooled.data.tobytes()


def test_oracle_jacobian(oracle_world: OracleWorld) -> None:
    delta_w, delta_targets = sample_canonical_differences(oracle_world, 8192, make_rng(2))
    j = build_jacobian(delta_w, delta_targets, target_shape=oracle_world.target_shape)
    truth = oracle_world.jacobian_truth()
    assert np.linalg.norm(j.data - truth) / np.linalg.norm(truth) < 0.05
    assert j.target_shape == [16, 16]
    assert j.column_map(0).shape == (16, 16)


def test_errors(rng: np.random.Generator) -> None:
    delta_w = rng.standard_normal((10, 3))
    with pytest.raises(ShapeMismatchError, match="rows"):
        build_jacobian(delta_w, np.ones((9, 2)))
    with pytest.raises(ShapeMismatchError, match="multiply out"):
        build_jacobian(delta_w, np.ones((10, 6)), target_shape=[4, 2])
    with pytest.raises(InvalidParameterError, match="workers"):
        build_jacobian(delta_w, np.ones((10, 2)), workers=0)
    with pytest.raises(RankDeficientError):
        build_jacobian(np.column_stack([delta_w[:, 0], delta_w[:, 0]]), np.ones((10, 1)))


def test_ridge_handles_rank_deficiency(rng: np.random.Generator) -> None:
    column = rng.standard_normal(10)
    j = build_jacobian(np.column_stack([column, column]), column[:, None], ridge=1e-6)
    assert np.allclose(j.data, [[0.5, 0.5]], atol=1e-5)


def test_jacobian_matrix_validation() -> None:
    with pytest.raises(InvalidParameterError, match="non-finite"):
        JacobianMatrix(np.array([[np.nan]]))
    with pytest.raises(ShapeMismatchError):
        JacobianMatrix(np.ones((6, 2)), target_shape=[4, 2])
    assert JacobianMatrix(np.ones((6, 2)), target_shape=[2, 3]).target_shape == [2, 3]
