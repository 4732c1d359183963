"""Alternating first-order solver for the localized component factorization."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Self, Tuple

import numpy as np
from dataclasses_json import dataclass_json

from linsem.core.errors import InvalidParameterError, SolverDivergedError
from linsem.core.linalg import normalize_columns
from linsem.core.types import FloatArray, make_rng
from linsem.jacobian import JacobianMatrix
from linsem.localized.component_model import ComponentModel, ObjectiveTerms, objective_terms
from linsem.localized.optimizer import Adam

__all__ = [
    "PRESETS",
    "SolveReport",
    "SolverConfig",
    "SolverPreset",
    "TraceEntry",
    "UpdateRule",
    "initial_model",
    "solve",
]

_solver_logger = logging.getLogger("linsem.localized.solver")

INIT_JITTER = 1e-3


class UpdateRule(enum.Enum):
    """How the L1 penalty on U enters the update."""

    SUBGRADIENT = "subgradient"
    PROXIMAL = "proximal"


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    :param max_iters: Hard iteration cap.
    :param lr: Adam learning rate.
    :param seed: Seed of the initialization jitter.
    :param tol: Relative objective decrease per window below which the run stops.
    :param window: Iterations between convergence checks.
    :param update_rule: Subgradient Adam steps on U, or proximal soft-thresholding steps.
    :param log_every: Iterations between objective trace entries, ``window`` if 0.
    """

    max_iters: int = 500_000
    lr: float = 1e-4
    seed: int = 0
    tol: float = 1e-6
    window: int = 1000
    update_rule: UpdateRule = UpdateRule.SUBGRADIENT
    log_every: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.max_iters < 0:
            raise InvalidParameterError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.lr <= 0:
            raise InvalidParameterError(f"lr must be positive, got {self.lr}")
        if self.tol < 0:
            raise InvalidParameterError(f"tol must be >= 0, got {self.tol}")
        if self.window < 1 or self.log_every < 0:
            raise InvalidParameterError(
                f"window must be positive and log_every >= 0, got {self.window} "
                f"and {self.log_every}"
            )
        object.__setattr__(self, "update_rule", UpdateRule(self.update_rule))

    @property
    def trace_interval(self) -> int:
        return self.log_every or self.window


@dataclass(frozen=True)
class SolverPreset:
    """A named (P, α, β) configuration."""

    name: str
    p: int
    alpha: float
    beta: float


PRESETS = {
    "ffhq": SolverPreset(name="ffhq", p=200, alpha=1.0, beta=1.0),
    "high-pose": SolverPreset(name="high-pose", p=200, alpha=5.0, beta=10.0),
}


@dataclass_json
@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    total: float
    recon: float
    l1: float
    ortho: float

    @classmethod
    def at(cls, iteration: int, terms: ObjectiveTerms) -> Self:
        return cls(iteration, terms.total, terms.recon, terms.l1, terms.ortho)


@dataclass_json
@dataclass
class SolveReport:
    """What happened during a solve.

    :param objective_trace: Objective terms at the logged iterations.
    :param iterations_run: How many iterations were executed.
    :param converged: Whether the run stopped on the tolerance rather than the cap.
    :param warnings: Conditions worth a look, such as P > min(S, d).
    """

    objective_trace: List[TraceEntry] = field(default_factory=list)
    iterations_run: int = 0
    converged: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def final(self) -> TraceEntry | None:
        return self.objective_trace[-1] if self.objective_trace else None

    @classmethod
    def load(cls, path: Path) -> Self:
        return cls.from_json(Path(path).read_text(encoding="utf-8"))  # type: ignore

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(indent=2) + "\n", encoding="utf-8")  # type: ignore


def initial_model(
    j: JacobianMatrix, p: int, seed: int, report: SolveReport | None = None
) -> Tuple[FloatArray, FloatArray]:
    """Truncated-SVD start: ``U = U_svd·s`` and ``V̂ = V_svd`` plus seeded jitter.

    Components beyond ``min(S, d)`` start from random unit directions with ``u = 0``.

    :return: The S×P ``U`` and the d×P unit-column ``V̂``.
    """
    left, singular, right_t = np.linalg.svd(j.data, full_matrices=False)
    k = min(p, singular.shape[0])
    rng = make_rng(seed)

    u = np.zeros((j.n_targets, p))
    u[:, :k] = left[:, :k] * singular[:k]
    v_hat = np.empty((j.dim, p))
    v_hat[:, :k] = right_t[:k].T
    if p > k:
        message = (
            f"P={p} exceeds min(S, d)={k}; {p - k} component(s) start from random "
            f"directions"
        )
        _solver_logger.warning(message)
        if report is not None:
            report.warnings.append(message)
        v_hat[:, k:] = rng.standard_normal((j.dim, p - k))
        v_hat[:, k:] = normalize_columns(v_hat[:, k:], "initial direction")

    v_hat += INIT_JITTER * rng.standard_normal(v_hat.shape)
    return u, normalize_columns(v_hat, "initial latent representation")


def _soft_threshold(x: FloatArray, threshold: float) -> FloatArray:
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def _update_u(
    u: FloatArray,
    v_hat: FloatArray,
    j: FloatArray,
    alpha: float,
    rule: UpdateRule,
    adam: Adam,
) -> None:
    residual = u @ v_hat.T - j
    smooth_grad = 2.0 * residual @ v_hat
    match rule:
        case UpdateRule.SUBGRADIENT:
            adam.step("u", u, smooth_grad + alpha * np.sign(u))
        case UpdateRule.PROXIMAL:
            lipschitz = 2.0 * np.linalg.norm(v_hat.T @ v_hat, ord=2)
            if lipschitz == 0:
                return
            step = 1.0 / lipschitz
            u[...] = _soft_threshold(u - step * smooth_grad, alpha * step)


def _update_v_hat(
    u: FloatArray, v_hat: FloatArray, j: FloatArray, beta: float, adam: Adam
) -> None:
    residual = u @ v_hat.T - j
    overlap = v_hat.T @ v_hat
    np.fill_diagonal(overlap, 0.0)
    grad = 2.0 * residual.T @ u + 4.0 * beta * v_hat @ overlap
    adam.step("v_hat", v_hat, grad)
    v_hat[...] = normalize_columns(v_hat, "latent representation")


def solve(
    j: JacobianMatrix,
    p: int,
    alpha: float = 1.0,
    beta: float = 1.0,
    config: SolverConfig = SolverConfig(),
) -> Tuple[ComponentModel, SolveReport]:
    """Factor ``J ≈ U V̂ᵀ`` with sparse U and unit, near-orthogonal V̂ columns.

    Each iteration updates U and then V̂; every V̂ column is projected back to unit
    length after its update. The run stops after ``max_iters`` or at the first
    window whose relative objective decrease falls below ``tol``.

    :param j: The S×d Jacobian.
    :param p: The number of components.
    :param alpha: L1 weight on U.
    :param beta: Orthogonality weight on V̂.
    :param config: The solver settings.
    :raises SolverDivergedError: If U, V̂ or the objective stop being finite. The check on
        U and V̂ runs every iteration.
    """
    if p < 1:
        raise InvalidParameterError(f"P must be at least 1, got {p}")
    if alpha < 0 or beta < 0:
        raise InvalidParameterError(f"alpha and beta must be >= 0, got {alpha} and {beta}")

    report = SolveReport()
    u, v_hat = initial_model(j, p, config.seed, report)
    target = j.data
    adam = Adam(lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)
    logger = _solver_logger.getChild(f"P{p}_a{alpha:g}_b{beta:g}")

    terms = objective_terms(u, v_hat, target, alpha, beta)
    report.objective_trace.append(TraceEntry.at(0, terms))
    last_finite = terms
    window_start = terms.total
    iteration = 0

    while iteration < config.max_iters:
        iteration += 1
        _update_u(u, v_hat, target, alpha, config.update_rule, adam)
        _update_v_hat(u, v_hat, target, beta, adam)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v_hat))):
            raise SolverDivergedError(iteration, last_finite)

        at_window = iteration % config.window == 0
        at_trace = iteration % config.trace_interval == 0
        if not (at_window or at_trace or iteration == config.max_iters):
            continue

        terms = objective_terms(u, v_hat, target, alpha, beta)
        if not np.isfinite(terms.total):
            raise SolverDivergedError(iteration, last_finite)
        last_finite = terms
        logged = at_trace or iteration == config.max_iters
        if logged:
            report.objective_trace.append(TraceEntry.at(iteration, terms))
            logger.debug(f"iteration {iteration}: {terms}")

        if at_window:
            decrease = (window_start - terms.total) / max(abs(window_start), 1e-300)
            window_start = terms.total
            if decrease < config.tol:
                report.converged = True
                if not logged:
                    report.objective_trace.append(TraceEntry.at(iteration, terms))
                break

    report.iterations_run = iteration
    logger.info(
        f"Solve finished after {iteration} iterations "
        f"({'converged' if report.converged else 'iteration cap'}), "
        f"objective {last_finite.total:.6g}"
    )
    return ComponentModel(u=u.copy(), v_hat=v_hat.copy(), alpha=alpha, beta=beta), report
