import numpy as np
import pytest

from linsem.core import LatentBatch
from linsem.core.errors import InsufficientSamplesError
from linsem.core.gradcheck import central_differences, max_relative_error
from linsem.decorr import CLAMP_DELTA, VarianceTerm, decorr_grad, decorr_loss
from tests.conftest import RHO_HALF_CORR_TERM, batch_with_correlation, random_batch

SQUARE_CORNERS = LatentBatch(np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float))


def _numeric_grad(batch: LatentBatch, variance_term: VarianceTerm) -> np.ndarray:
    return central_differences(
        lambda x: decorr_loss(LatentBatch(x), variance_term).total, batch.data, h=1e-5
    )


def test_decorrelated_equal_variance_batch_has_zero_loss() -> None:
    loss = decorr_loss(SQUARE_CORNERS)
    assert loss.total == pytest.approx(0.0, abs=1e-12)
    assert loss.clamp_count == 0


def test_single_dimension_has_zero_loss() -> None:
    loss = decorr_loss(LatentBatch(np.array([[0.3], [1.2], [-2.0]])))
    assert loss.total == 0.0


def test_half_correlation_batch() -> None:
    loss = decorr_loss(batch_with_correlation(0.5))
    assert loss.corr_term == pytest.approx(RHO_HALF_CORR_TERM, abs=1e-9)
    assert loss.var_term == pytest.approx(0.0, abs=1e-12)
    assert loss.total == pytest.approx(loss.corr_term + loss.var_term)


def test_sum_variance_term() -> None:
    loss = decorr_loss(SQUARE_CORNERS, VarianceTerm.SUM)
    assert loss.var_term == pytest.approx(2 * (4 / 3) ** 2)


def test_needs_two_rows() -> None:
    batch = LatentBatch(np.array([[1.0, 2.0]]))
    with pytest.raises(InsufficientSamplesError, match="insufficient samples"):
        decorr_loss(batch)
    with pytest.raises(InsufficientSamplesError):
        decorr_grad(batch)


def test_identical_columns_are_clamped() -> None:
    column = np.array([1.0, 2.0, 4.0, 8.0])
    batch = LatentBatch(np.column_stack([column, column]))
    loss = decorr_loss(batch)
    assert loss.clamp_count == 2
    assert loss.corr_term == pytest.approx(-2 * np.log(CLAMP_DELTA))
    # clamped pairs and equal variances leave nothing to differentiate
    assert np.allclose(decorr_grad(batch), 0.0)


@pytest.mark.parametrize("seed", range(6))
def test_loss_is_non_negative(seed: int) -> None:
    assert decorr_loss(random_batch(16, 4, seed)).total >= 0.0


def test_loss_invariances() -> None:
    batch = random_batch(32, 5, seed=4)
    loss = decorr_loss(batch).total
    permuted = LatentBatch(batch.data[:, [3, 1, 4, 0, 2]])
    shifted = LatentBatch(batch.data + np.arange(5.0))
    assert decorr_loss(permuted).total == pytest.approx(loss, rel=1e-12)
    assert decorr_loss(shifted).total == pytest.approx(loss, rel=1e-9)


def test_gradient_vanishes_at_the_minimum() -> None:
    assert np.allclose(decorr_grad(SQUARE_CORNERS), 0.0, atol=1e-12)
    numeric = _numeric_grad(SQUARE_CORNERS, VarianceTerm.MEAN)
    assert np.allclose(numeric, 0.0, atol=1e-4)


@pytest.mark.parametrize("seed", range(100))
def test_gradient_matches_finite_differences(seed: int) -> None:
    batch = random_batch(32, 6, seed)
    analytic = decorr_grad(batch)
    numeric = _numeric_grad(batch, VarianceTerm.MEAN)
    assert max_relative_error(analytic, numeric) < 1e-5


@pytest.mark.parametrize("seed", range(5))
def test_sum_gradient_matches_finite_differences(seed: int) -> None:
    batch = random_batch(12, 4, seed)
    analytic = decorr_grad(batch, VarianceTerm.SUM)
    numeric = _numeric_grad(batch, VarianceTerm.SUM)
    assert max_relative_error(analytic, numeric) < 1e-5


def test_gradient_shape() -> None:
    batch = random_batch(7, 3, seed=1)
    assert decorr_grad(batch).shape == (7, 3)
