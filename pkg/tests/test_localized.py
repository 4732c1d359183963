import logging

import numpy as np
import pytest
from pytest_mock import MockerFixture

import linsem.localized.solver as solver_module
from linsem.core import make_rng
from linsem.core.errors import (
    InvalidParameterError,
    NonUnitColumnError,
    ShapeMismatchError,
    SolverDivergedError,
)
from linsem.jacobian import JacobianMatrix
from linsem.localized import (
    PRESETS,
    Adam,
    ComponentModel,
    SolveReport,
    SolverConfig,
    UpdateRule,
    component_grids,
    initial_model,
    max_offdiagonal_overlap,
    objective,
    prune,
    solve,
    summarize,
)
from linsem.oracle import OracleWorld

EYE = np.eye(2)


def _random_jacobian(seed: int, rows: int = 12, cols: int = 6) -> JacobianMatrix:
    return JacobianMatrix(make_rng(seed).standard_normal((rows, cols)))


def test_identity_objective() -> None:
    terms = objective(ComponentModel(u=EYE, v_hat=EYE), JacobianMatrix(EYE))
    assert terms.recon == 0.0
    assert terms.l1 == 2.0
    assert terms.ortho == 0.0
    assert terms.total == 2.0


def test_unpenalized_exact_factorization() -> None:
    rng = make_rng(2)
    u = rng.standard_normal((5, 3))
    v_hat, _ = np.linalg.qr(rng.standard_normal((4, 3)))
    model = ComponentModel(u=u, v_hat=v_hat, alpha=0.0, beta=0.0)
    terms = objective(model, JacobianMatrix(u @ v_hat.T))
    assert terms.total == pytest.approx(0.0, abs=1e-20)


def test_single_component_has_no_overlap_penalty() -> None:
    model = ComponentModel(u=np.ones((3, 1)), v_hat=np.array([[0.6], [0.8]]), beta=50.0)
    assert objective(model, JacobianMatrix(np.zeros((3, 2)))).ortho == 0.0


def test_overlap_counts_ordered_pairs() -> None:
    v_hat = np.array([[1.0, 0.6], [0.0, 0.8]])
    model = ComponentModel(u=np.zeros((1, 2)), v_hat=v_hat, beta=1.0)
    assert objective(model, JacobianMatrix(np.zeros((1, 2)))).ortho == pytest.approx(
        2 * 0.36
    )
    assert max_offdiagonal_overlap(v_hat) == pytest.approx(0.6)


@pytest.mark.parametrize("seed", range(3))
def test_objective_ignores_component_order_and_signs(seed: int) -> None:
    rng = make_rng(seed)
    u = rng.standard_normal((10, 5))
    v_hat = rng.standard_normal((6, 5))
    v_hat /= np.linalg.norm(v_hat, axis=0)
    j = JacobianMatrix(rng.standard_normal((10, 6)))
    order = rng.permutation(5)
    signs = rng.choice([-1.0, 1.0], size=5)
    model = ComponentModel(u=u, v_hat=v_hat, alpha=0.7, beta=2.0)
    shuffled = ComponentModel(
        u=u[:, order] * signs[order], v_hat=v_hat[:, order] * signs[order], alpha=0.7, beta=2.0
    )
    before, after = objective(model, j), objective(shuffled, j)
    assert after.total == pytest.approx(before.total, rel=1e-12)
    assert after.recon == pytest.approx(before.recon, rel=1e-12)
    assert after.l1 == pytest.approx(before.l1, rel=1e-12)
    assert after.ortho == pytest.approx(before.ortho, rel=1e-12)


def test_objective_rejects_non_unit_columns() -> None:
    model = ComponentModel(u=EYE, v_hat=np.array([[1.0, 0.0], [0.0, 1.1]]))
    with pytest.raises(NonUnitColumnError) as excinfo:
        objective(model, JacobianMatrix(EYE))
    assert excinfo.value.indices == [1]


def test_objective_shape_mismatch() -> None:
    with pytest.raises(ShapeMismatchError):
        objective(ComponentModel(u=EYE, v_hat=EYE), JacobianMatrix(np.eye(3)))


def test_model_validation() -> None:
    with pytest.raises(ShapeMismatchError, match="components"):
        ComponentModel(u=np.ones((3, 2)), v_hat=np.ones((4, 3)))
    with pytest.raises(InvalidParameterError):
        ComponentModel(u=EYE, v_hat=EYE, alpha=-1.0)


def test_prune_keeps_large_components_in_order() -> None:
    u = np.array([[1.0, 0.001, 0.0, 2.0], [0.0, 0.001, 0.0, 0.0]])
    model = ComponentModel(u=u, v_hat=np.eye(4), alpha=3.0, beta=4.0)
    pruned = prune(model)
    assert pruned.n_components == 2
    assert np.array_equal(pruned.u, u[:, [0, 3]])
    assert np.array_equal(pruned.v_hat, np.eye(4)[:, [0, 3]])
    assert (pruned.alpha, pruned.beta) == (3.0, 4.0)


def test_prune_everything() -> None:
    pruned = prune(ComponentModel(u=np.zeros((3, 2)), v_hat=EYE))
    assert pruned.n_components == 0
    assert pruned.u.shape == (3, 0)
    assert summarize(pruned).mean_l1 == 0.0


def test_prune_threshold_validation() -> None:
    with pytest.raises(InvalidParameterError):
        prune(ComponentModel(u=EYE, v_hat=EYE), threshold=-1.0)


def test_component_grids() -> None:
    model = ComponentModel(u=np.arange(12.0).reshape(6, 2), v_hat=EYE)
    grids = component_grids(model, [2, 3])
    assert len(grids) == 2
    assert grids[0].tolist() == [[0.0, 2.0, 4.0], [6.0, 8.0, 10.0]]
    assert component_grids(model, [6])[1].shape == (1, 6)
    with pytest.raises(ShapeMismatchError):
        component_grids(model, [4, 2])


def test_summarize() -> None:
    model = ComponentModel(u=np.array([[1.0, -2.0], [1.0, 0.0]]), v_hat=EYE)
    summary = summarize(model, JacobianMatrix(np.zeros((2, 2))))
    assert summary.surviving == 2
    assert summary.mean_l1 == 2.0
    assert summary.max_offdiag == 0.0
    assert summary.objective == pytest.approx(6.0 + 4.0)


def test_presets() -> None:
    assert (PRESETS["ffhq"].p, PRESETS["ffhq"].alpha, PRESETS["ffhq"].beta) == (200, 1.0, 1.0)
    assert PRESETS["high-pose"].alpha > PRESETS["ffhq"].alpha
    assert PRESETS["high-pose"].beta > PRESETS["ffhq"].beta


def test_adam_first_step_moves_by_learning_rate() -> None:
    param = np.array([1.0, -1.0])
    adam = Adam(lr=0.1)
    adam.step("x", param, np.array([4.0, -0.01]))
    assert np.allclose(param, [0.9, -0.9], atol=1e-6)
    assert adam.steps("x") == 1
    assert adam.steps("y") == 0


def test_adam_minimizes_a_quadratic() -> None:
    param = np.array([3.0])
    adam = Adam(lr=0.05)
    for _ in range(2000):
        adam.step("x", param, 2.0 * param)
    assert abs(param[0]) < 0.1


def test_adam_reset_and_validation() -> None:
    adam = Adam()
    adam.step("x", np.zeros(2), np.ones(2))
    adam.reset("x")
    assert adam.steps("x") == 0
    with pytest.raises(InvalidParameterError):
        Adam(lr=0.0)
    with pytest.raises(InvalidParameterError):
        Adam(beta1=1.0)


def test_solver_config_validation() -> None:
    with pytest.raises(InvalidParameterError):
        SolverConfig(lr=-1.0)
    with pytest.raises(InvalidParameterError):
        SolverConfig(window=0)
    assert SolverConfig(update_rule="proximal").update_rule is UpdateRule.PROXIMAL
    assert SolverConfig(window=50).trace_interval == 50
    assert SolverConfig(window=50, log_every=7).trace_interval == 7


def test_initial_model_reconstructs_with_full_rank() -> None:
    j = _random_jacobian(1, rows=5, cols=4)
    u, v_hat = initial_model(j, 4, seed=0)
    assert np.allclose(np.linalg.norm(v_hat, axis=0), 1.0)
    assert np.allclose(u @ v_hat.T, j.data, atol=5e-2)


def test_too_many_components_warns(caplog: pytest.LogCaptureFixture) -> None:
    j = _random_jacobian(2, rows=3, cols=2)
    report = SolveReport()
    with caplog.at_level(logging.WARNING, logger="linsem.localized.solver"):
        u, v_hat = initial_model(j, 4, seed=0, report=report)
    assert "exceeds min(S, d)" in caplog.text
    assert len(report.warnings) == 1
    assert np.allclose(u[:, 2:], 0.0)
    assert np.allclose(np.linalg.norm(v_hat, axis=0), 1.0)


@pytest.mark.parametrize("rule", list(UpdateRule))
def test_solve_keeps_unit_columns_and_descends(rule: UpdateRule) -> None:
    j = _random_jacobian(3)
    config = SolverConfig(
        max_iters=300, lr=1e-2, window=1000, log_every=50, tol=0.0, update_rule=rule
    )
    model, report = solve(j, 4, alpha=0.5, beta=1.0, config=config)
    assert model.u.shape == (12, 4)
    assert np.allclose(np.linalg.norm(model.v_hat, axis=0), 1.0, atol=1e-12)
    assert report.iterations_run == 300
    assert not report.converged
    trace = [entry.iteration for entry in report.objective_trace]
    assert trace == [0, 50, 100, 150, 200, 250, 300]
    assert report.final.total < report.objective_trace[0].total
    assert objective(model, j).total == pytest.approx(report.final.total)


def test_objective_trace_descends_window_by_window(oracle_world: OracleWorld) -> None:
    config = SolverConfig(max_iters=5000, lr=1e-4, window=1000, log_every=1000, tol=0.0)
    _, report = solve(JacobianMatrix(oracle_world.jacobian_truth()), 8, 0.03, 1.0, config)
    trace = report.objective_trace
    assert [entry.iteration for entry in trace] == [0, 1000, 2000, 3000, 4000, 5000]
    for earlier, later in zip(trace, trace[1:]):
        assert later.total <= earlier.total * (1 + 1e-6)
    assert trace[-1].total < trace[0].total


def test_solve_is_deterministic() -> None:
    j = _random_jacobian(4)
    config = SolverConfig(max_iters=100, lr=1e-2, window=20, seed=9)
    first, _ = solve(j, 3, config=config)
    second, _ = solve(j, 3, config=config)
    assert first.u.tobytes() == second.u.tobytes()
    assert first.v_hat.tobytes() == second.v_hat.tobytes()


def test_solve_stops_on_tolerance() -> None:
    config = SolverConfig(max_iters=10_000, lr=1e-3, window=10, tol=1.0)
    _, report = solve(_random_jacobian(5), 2, config=config)
    assert report.converged
    assert report.iterations_run == 10
    assert report.final.iteration == 10


def test_solve_without_iterations_returns_initial_model() -> None:
    j = _random_jacobian(6)
    model, report = solve(j, 3, config=SolverConfig(max_iters=0, seed=2))
    u, v_hat = initial_model(j, 3, seed=2)
    assert np.array_equal(model.u, u)
    assert np.array_equal(model.v_hat, v_hat)
    assert report.iterations_run == 0
    assert len(report.objective_trace) == 1


def test_proximal_step_zeroes_u_under_a_huge_penalty() -> None:
    config = SolverConfig(max_iters=1, update_rule=UpdateRule.PROXIMAL)
    model, _ = solve(_random_jacobian(7), 3, alpha=1e6, config=config)
    assert np.count_nonzero(model.u) == 0
    assert prune(model).n_components == 0


def test_solve_rejects_bad_parameters() -> None:
    j = _random_jacobian(8)
    with pytest.raises(InvalidParameterError):
        solve(j, 0)
    with pytest.raises(InvalidParameterError):
        solve(j, 2, alpha=-0.5)


def test_solve_report_json(tmp_path) -> None:
    _, report = solve(_random_jacobian(9), 2, config=SolverConfig(max_iters=20, window=10))
    path = tmp_path / "report.json"
    report.save(path)
    loaded = SolveReport.load(path)
    assert loaded.iterations_run == 20
    assert loaded.objective_trace == report.objective_trace


def test_solve_stops_at_the_first_non_finite_iterate(mocker: MockerFixture) -> None:
    original = solver_module._update_u
    calls = 0

    def poisoned(u, v_hat, j, alpha, rule, adam) -> None:
        nonlocal calls
        calls += 1
        original(u, v_hat, j, alpha, rule, adam)
        if calls == 3:
            u[0, 0] = np.nan

    mocker.patch.object(solver_module, "_update_u", side_effect=poisoned)
    config = SolverConfig(max_iters=5000, lr=1e-2, window=1000, log_every=1000, tol=0.0)
    with pytest.raises(SolverDivergedError) as exc_info:
        solve(_random_jacobian(10), 3, config=config)
    assert exc_info.value.iteration == 3
    assert calls == 3
