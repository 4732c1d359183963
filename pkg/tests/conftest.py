from pathlib import Path
from typing import List

import numpy as np
import pytest
from typer.testing import CliRunner

from linsem.core import LatentBatch, make_rng
from linsem.core.types import FloatArray
from linsem.oracle import OracleSpec, OracleWorld, make_world

# corr_term of a d=2 batch with ρ₁₂ = 0.5: -2·log(0.5)
RHO_HALF_CORR_TERM = 1.3862943611
# second Ward height of d(0,1)=0.1, d(0,2)=d(1,2)=0.9
WARD_P3_SECOND_HEIGHT = float(np.sqrt((2 * 0.81 + 2 * 0.81 - 0.01) / 3))

SMALL_SPEC = OracleSpec(
    d=16,
    s=64,
    p_true=4,
    sparsity=0.25,
    noise_sigma=0.0,
    seed=3,
    directions=["pose", "smile"],
    target_shape=[8, 8],
)
ORACLE_SPEC = OracleSpec(
    d=32, s=256, p_true=6, sparsity=0.1, noise_sigma=0.01, seed=7, target_shape=[16, 16]
)


def random_batch(n: int, d: int, seed: int) -> LatentBatch:
    """A correlated, unequal-variance batch so no loss term vanishes."""
    rng = make_rng(seed)
    mixing = rng.standard_normal((d, d)) + np.eye(d)
    return LatentBatch(rng.standard_normal((n, d)) @ mixing)


def batch_with_correlation(rho: float) -> LatentBatch:
    """Four rows, two equal-variance columns with sample correlation exactly ``rho``."""
    # centered orthonormal basis of R⁴ orthogonal to the ones vector
    a = np.array([1.0, -1.0, 1.0, -1.0]) / 2
    b = np.array([1.0, 1.0, -1.0, -1.0]) / 2
    x = a
    y = rho * a + np.sqrt(1 - rho**2) * b
    return LatentBatch(np.column_stack([x, y]))


def unit_columns(rng: np.random.Generator, rows: int, cols: int) -> FloatArray:
    columns = rng.standard_normal((rows, cols))
    return columns / np.linalg.norm(columns, axis=0)


def csv_rows(path: Path) -> List[List[float]]:
    return [
        [float(cell) for cell in line.split(",")]
        for line in path.read_text(encoding="utf-8").splitlines()
        if line
    ]


@pytest.fixture()
def rng() -> np.random.Generator:
    return make_rng(0)


@pytest.fixture(scope="session")
def small_world() -> OracleWorld:
    return make_world(SMALL_SPEC)


@pytest.fixture(scope="session")
def oracle_world() -> OracleWorld:
    return make_world(ORACLE_SPEC)


@pytest.fixture()
def cli_runner() -> CliRunner:
    return CliRunner()
