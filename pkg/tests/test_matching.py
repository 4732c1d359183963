import numpy as np
import pytest

from linsem.core import make_rng
from linsem.core.errors import ShapeMismatchError, UserInputError
from linsem.localized import ComponentModel, match_components, support_iou
from tests.conftest import unit_columns


def _truth(seed: int = 0, rows: int = 20, dim: int = 8, p: int = 4) -> ComponentModel:
    rng = make_rng(seed)
    u = rng.standard_normal((rows, p)) * (rng.random((rows, p)) < 0.3)
    return ComponentModel(u=u, v_hat=unit_columns(rng, dim, p))


def test_identity_match() -> None:
    truth = _truth()
    result = match_components(truth, truth)
    assert result.assignment == [0, 1, 2, 3]
    assert result.min_abs_cos == pytest.approx(1.0)
    assert result.min_support_iou == 1.0


def test_permuted_and_sign_flipped_components() -> None:
    truth = _truth(seed=1)
    order = [2, 0, 3, 1]
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    found = ComponentModel(u=truth.u[:, order] * signs, v_hat=truth.v_hat[:, order] * signs)

    result = match_components(found, truth)
    assert result.assignment == [1, 3, 0, 2]
    assert result.min_abs_cos == pytest.approx(1.0)
    assert result.min_support_iou == 1.0


def test_extra_found_components_are_left_out() -> None:
    truth = _truth(seed=2, p=3)
    rng = make_rng(11)
    extra_u = np.zeros((truth.n_targets, 2))
    found = ComponentModel(
        u=np.hstack([extra_u, truth.u]),
        v_hat=np.hstack([unit_columns(rng, truth.dim, 2), truth.v_hat]),
    )
    result = match_components(found, truth)
    assert result.assignment == [2, 3, 4]


def test_too_few_found_components() -> None:
    truth = _truth(seed=3)
    found = ComponentModel(u=truth.u[:, :2], v_hat=truth.v_hat[:, :2])
    with pytest.raises(UserInputError, match="cannot match 4"):
        match_components(found, truth)


def test_shape_mismatch() -> None:
    truth = _truth(seed=4)
    other = _truth(seed=4, dim=9)
    with pytest.raises(ShapeMismatchError):
        match_components(other, truth)


def test_empty_truth() -> None:
    empty = ComponentModel(u=np.zeros((20, 0)), v_hat=np.zeros((8, 0)))
    result = match_components(_truth(), empty)
    assert result.matches == []
    assert result.min_abs_cos == 1.0


def test_support_iou() -> None:
    truth = np.array([1.0, 0.0, 0.5, 0.0])
    assert support_iou(truth, truth) == 1.0
    assert support_iou(np.array([1.0, 1.0, 0.0, 0.0]), truth) == pytest.approx(1 / 3)
    assert support_iou(np.array([1.0, 0.01, 0.5, 0.0]), truth) == 1.0
    assert support_iou(np.zeros(4), np.zeros(4)) == 1.0
    assert support_iou(np.ones(4), np.zeros(4)) == 0.0
