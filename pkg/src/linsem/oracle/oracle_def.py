"""A planted linear-generative world with known directions and sparse components."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Self, Tuple

import numpy as np
from dataclasses_json import dataclass_json
from numpy.typing import ArrayLike

from linsem.core.errors import InvalidParameterError, ShapeMismatchError, UnknownDirectionError
from linsem.core.matrix_io import read_matrix, write_matrix
from linsem.core.types import FloatArray, RngSeed, make_rng
from linsem.direction import DifferenceSet
from linsem.localized import ComponentModel

__all__ = [
    "MAGNITUDE_RANGE",
    "OracleSpec",
    "OracleWorld",
    "PairStrategy",
    "load_world",
    "make_world",
    "observe_canonical",
    "observe_scalar",
    "observe_scalars",
    "sample_canonical_differences",
    "sample_difference_set",
    "sample_pairs",
    "save_world",
]

_oracle_logger = logging.getLogger("linsem.oracle")

MAGNITUDE_RANGE = (0.5, 2.0)
WORLD_RECORD = "directions.json"

Rng = np.random.Generator | RngSeed | int


@dataclass_json
@dataclass(frozen=True)
class OracleSpec:
    """The shape of a planted world.

    :param d: Latent dimension.
    :param s: Target dimension.
    :param p_true: Number of planted components.
    :param sparsity: Fraction of nonzero entries in every planted component.
    :param noise_sigma: Observation noise standard deviation.
    :param seed: The world's seed.
    :param directions: Names of the planted scalar semantics.
    :param target_shape: Sizes whose product is ``s``, ``[s]`` when empty.
    """

    d: int = 32
    s: int = 256
    p_true: int = 6
    sparsity: float = 0.1
    noise_sigma: float = 0.01
    seed: int = 0
    directions: List[str] = field(default_factory=lambda: ["pose", "smile", "age"])
    target_shape: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.d < 1 or self.s < 1:
            raise InvalidParameterError(f"d and s must be positive, got {self.d}, {self.s}")
        if not 1 <= self.p_true <= min(self.s, self.d):
            raise InvalidParameterError(
                f"p_true must lie in [1, min(s, d)] = [1, {min(self.s, self.d)}], "
                f"got {self.p_true}"
            )
        if not 0.0 < self.sparsity <= 1.0:
            raise InvalidParameterError(f"sparsity must lie in (0, 1], got {self.sparsity}")
        if self.noise_sigma < 0:
            raise InvalidParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if len(set(self.directions)) != len(self.directions):
            raise InvalidParameterError(f"direction names repeat: {self.directions}")
        if self.target_shape and math.prod(self.target_shape) != self.s:
            raise ShapeMismatchError(
                f"target shape {self.target_shape} does not multiply out to {self.s}"
            )
        RngSeed(self.seed)

    @property
    def support_size(self) -> int:
        """Nonzero entries per planted component."""
        return max(1, round(self.sparsity * self.s))


@dataclass(frozen=True)
class OracleWorld:
    """Ground truth: ``target(w) = bias + U* V*ᵀ w`` and ``y_name(w) = v_nameᵀ w``.

    :param spec: The spec it was made from.
    :param u_star: The S×p_true planted components.
    :param v_star: The d×p_true orthonormal latent representations.
    :param direction_truths: Name → unit d-vector of every scalar semantic.
    :param bias: The S-vector offset of the canonical target.
    """

    spec: OracleSpec
    u_star: FloatArray
    v_star: FloatArray
    direction_truths: Dict[str, FloatArray]
    bias: FloatArray

    def direction(self, name: str) -> FloatArray:
        """The planted unit direction of semantic ``name``.

        :raises UnknownDirectionError: If there is no such semantic.
        """
        if name not in self.direction_truths:
            raise UnknownDirectionError(name, self.direction_truths)
        return self.direction_truths[name]

    def jacobian_truth(self) -> FloatArray:
        """``J* = U* V*ᵀ``."""
        return self.u_star @ self.v_star.T

    def truth_model(self) -> ComponentModel:
        """The planted factorization as a component model."""
        return ComponentModel(u=self.u_star, v_hat=self.v_star, alpha=0.0, beta=0.0)

    @property
    def target_shape(self) -> List[int]:
        return list(self.spec.target_shape) or [self.spec.s]


def _orthonormal_columns(rng: np.random.Generator, rows: int, cols: int) -> FloatArray:
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def make_world(spec: OracleSpec) -> OracleWorld:
    """Draw a planted world. The same spec always gives the same world.

    ``V*`` comes from the QR factorization of a Gaussian matrix. Every ``u*_p`` has a
    support drawn without replacement, Gaussian values scaled to unit norm and
    then to a magnitude drawn from ``[0.5, 2]``.
    """
    rng = make_rng(spec.seed)
    v_star = _orthonormal_columns(rng, spec.d, spec.p_true)

    u_star = np.zeros((spec.s, spec.p_true))
    magnitudes = rng.uniform(*MAGNITUDE_RANGE, size=spec.p_true)
    for p in range(spec.p_true):
        support = rng.choice(spec.s, size=spec.support_size, replace=False)
        values = rng.standard_normal(spec.support_size)
        norm = np.linalg.norm(values)
        if norm == 0:
            values[0], norm = 1.0, 1.0
        u_star[support, p] = values / norm * magnitudes[p]

    directions = {}
    for name in spec.directions:
        raw = rng.standard_normal(spec.d)
        directions[name] = raw / np.linalg.norm(raw)
    bias = rng.standard_normal(spec.s)

    _oracle_logger.debug(
        f"Made world d={spec.d} s={spec.s} p_true={spec.p_true} seed={spec.seed}"
    )
    return OracleWorld(
        spec=spec, u_star=u_star, v_star=v_star, direction_truths=directions, bias=bias
    )


def _noise(rng: np.random.Generator, sigma: float, shape: Tuple[int, ...]) -> FloatArray:
    return rng.normal(0.0, sigma, size=shape) if sigma > 0 else np.zeros(shape)


def _latents(world: OracleWorld, w: ArrayLike) -> FloatArray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim not in (1, 2) or w.shape[-1] != world.spec.d:
        raise ShapeMismatchError(
            f"latent codes must have trailing dimension {world.spec.d}, got {w.shape}"
        )
    return w


def observe_scalar(world: OracleWorld, name: str, w: ArrayLike, rng: Rng) -> FloatArray | float:
    """``v_nameᵀ w + ε`` for one code (a float) or an N×d batch (an N-vector).

    :raises UnknownDirectionError: If there is no such semantic.
    """
    v = world.direction(name)
    w = _latents(world, w)
    values = w @ v + _noise(make_rng(rng), world.spec.noise_sigma, w.shape[:-1])
    return float(values) if w.ndim == 1 else values


def observe_scalars(world: OracleWorld, w: ArrayLike, rng: Rng) -> Dict[str, FloatArray]:
    """Every planted semantic of an N×d batch, in spec order."""
    stream = make_rng(rng)
    w = np.atleast_2d(_latents(world, w))
    return {name: observe_scalar(world, name, w, stream) for name in world.spec.directions}


def observe_canonical(world: OracleWorld, w: ArrayLike, rng: Rng) -> FloatArray:
    """``bias + U* V*ᵀ w + ε``, an S-vector for one code or N×S for a batch."""
    w = _latents(world, w)
    clean = world.bias + (w @ world.v_star) @ world.u_star.T
    return clean + _noise(make_rng(rng), world.spec.noise_sigma, clean.shape)


class PairStrategy(enum.Enum):
    """How the two codes of a difference pair relate."""

    INDEPENDENT = "independent"
    PERTURBATION = "perturbation"


def sample_pairs(
    world: OracleWorld,
    n: int,
    rng: Rng,
    strategy: PairStrategy | str = PairStrategy.INDEPENDENT,
    perturbation: float = 0.1,
) -> Tuple[FloatArray, FloatArray]:
    """Draw ``n`` pairs ``(w₀, w₁)`` of standard normal codes.

    ``independent`` draws both codes; ``perturbation`` sets ``w₁ = w₀ + σ_p·ε``.
    """
    if n < 1:
        raise InvalidParameterError(f"need at least one pair, got {n}")
    strategy = PairStrategy(strategy)
    stream = make_rng(rng)
    w0 = stream.standard_normal((n, world.spec.d))
    match strategy:
        case PairStrategy.INDEPENDENT:
            w1 = stream.standard_normal((n, world.spec.d))
        case PairStrategy.PERTURBATION:
            if perturbation <= 0:
                raise InvalidParameterError(f"perturbation must be positive, got {perturbation}")
            w1 = w0 + perturbation * stream.standard_normal((n, world.spec.d))
    return w0, w1


def sample_difference_set(
    world: OracleWorld,
    name: str,
    n: int,
    rng: Rng,
    strategy: PairStrategy | str = PairStrategy.INDEPENDENT,
    perturbation: float = 0.1,
) -> DifferenceSet:
    """Noisy observations of one semantic at ``n`` pairs, as a difference set."""
    world.direction(name)
    stream = make_rng(rng)
    w0, w1 = sample_pairs(world, n, stream, strategy, perturbation)
    y0 = observe_scalar(world, name, w0, stream)
    y1 = observe_scalar(world, name, w1, stream)
    return DifferenceSet(delta_w=w1 - w0, delta_y=np.asarray(y1) - np.asarray(y0))


def sample_canonical_differences(
    world: OracleWorld,
    n: int,
    rng: Rng,
    strategy: PairStrategy | str = PairStrategy.INDEPENDENT,
    perturbation: float = 0.1,
) -> Tuple[FloatArray, FloatArray]:
    """Noisy canonical observations at ``n`` pairs.

    :return: The N×d latent differences and the N×S target differences.
    """
    stream = make_rng(rng)
    w0, w1 = sample_pairs(world, n, stream, strategy, perturbation)
    t0 = observe_canonical(world, w0, stream)
    t1 = observe_canonical(world, w1, stream)
    return w1 - w0, t1 - t0


@dataclass_json
@dataclass(frozen=True)
class _WorldRecord:
    spec: OracleSpec
    directions: Dict[str, List[float]]


def save_world(world: OracleWorld, out_dir: Path) -> List[Path]:
    """Write ``u_star.csv``, ``v_star.csv``, ``bias.csv`` and ``directions.json``.

    :return: The written matrix and record paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = world.spec.seed
    paths = [out_dir / "u_star.csv", out_dir / "v_star.csv", out_dir / "bias.csv"]
    write_matrix(paths[0], world.u_star, "u_star", seed, world.target_shape)
    write_matrix(paths[1], world.v_star, "v_star", seed)
    write_matrix(paths[2], world.bias, "bias", seed, world.target_shape)

    record = _WorldRecord(
        spec=world.spec,
        directions={name: v.tolist() for name, v in world.direction_truths.items()},
    )
    paths.append(out_dir / WORLD_RECORD)
    paths[-1].write_text(record.to_json(indent=2) + "\n", encoding="utf-8")  # type: ignore
    return paths


def load_world(world_dir: Path) -> OracleWorld:
    """Read a world written by :func:`save_world`."""
    world_dir = Path(world_dir)
    record_path = world_dir / WORLD_RECORD
    if not record_path.is_file():
        raise InvalidParameterError(f"{world_dir} holds no {WORLD_RECORD}")
    record = _WorldRecord.from_json(record_path.read_text(encoding="utf-8"))  # type: ignore
    u_star, _ = read_matrix(world_dir / "u_star.csv", role="u_star")
    v_star, _ = read_matrix(world_dir / "v_star.csv", role="v_star")
    bias, _ = read_matrix(world_dir / "bias.csv", role="bias")
    return OracleWorld(
        spec=record.spec,
        u_star=u_star,
        v_star=v_star,
        direction_truths={k: np.asarray(v) for k, v in record.directions.items()},
        bias=bias[:, 0],
    )
