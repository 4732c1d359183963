"""Reading and writing matrices as headerless CSV plus a JSON manifest."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from dataclasses_json import dataclass_json
from numpy.typing import ArrayLike

from linsem.core.errors import ManifestError
from linsem.core.types import FloatArray

__all__ = [
    "MatrixManifest",
    "manifest_path_for",
    "read_matrix",
    "write_matrix",
    "format_float",
]

_matrix_io_logger = logging.getLogger("linsem.core.matrix_io")

MANIFEST_SUFFIX = ".manifest.json"


@dataclass_json
@dataclass(frozen=True)
class MatrixManifest:
    """The JSON manifest accompanying every matrix CSV.

    :param rows: The number of rows.
    :param cols: The number of columns.
    :param role: What the matrix is, e.g. ``latent_batch`` or ``jacobian``.
    :param seed: The seed the matrix was produced with, if any.
    :param target_shape: The target shape whose product is the row count, if any.
    """

    rows: int
    cols: int
    role: str
    seed: Optional[int] = field(default=None)
    target_shape: Optional[list[int]] = field(default=None)


def manifest_path_for(csv_path: Path) -> Path:
    """``foo.csv`` → ``foo.manifest.json``."""
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + MANIFEST_SUFFIX)


def format_float(value: float) -> str:
    """Positional decimal notation with 17 significant digits, e.g. ``1.0000000000000000``."""
    return np.format_float_positional(value, precision=17, unique=False, fractional=False)


def write_matrix(
    path: Path,
    data: ArrayLike,
    role: str,
    seed: int | None = None,
    target_shape: list[int] | None = None,
) -> MatrixManifest:
    """Write a matrix as CSV with its manifest next to it.

    1-D input is written as a single column.

    :param path: The CSV path. The manifest goes to ``<stem>.manifest.json``.
    :param data: The matrix.
    :param role: The role recorded in the manifest.
    :param seed: The seed recorded in the manifest.
    :param target_shape: The target shape recorded in the manifest.
    """
    array = np.asarray(data, dtype=np.float64)
    if array.ndim == 1:
        array = array[:, None]
    if array.ndim != 2:
        raise ManifestError(f"only 1-D or 2-D arrays can be written, got {array.shape}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(format_float(x) for x in row) for row in array.tolist()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    manifest = MatrixManifest(
        rows=array.shape[0],
        cols=array.shape[1],
        role=role,
        seed=seed,
        target_shape=target_shape,
    )
    manifest_path_for(path).write_text(
        manifest.to_json(indent=2) + "\n", encoding="utf-8"  # type: ignore
    )
    _matrix_io_logger.debug(f"Wrote {array.shape} {role} matrix to {path}")
    return manifest


def read_manifest(path: Path) -> MatrixManifest:
    """Read the manifest belonging to a CSV path."""
    manifest_path = manifest_path_for(path)
    if not manifest_path.is_file():
        raise ManifestError(f"missing manifest {manifest_path} for {path}")
    return MatrixManifest.from_json(manifest_path.read_text(encoding="utf-8"))  # type: ignore


def read_matrix(
    path: Path, role: str | None = None
) -> Tuple[FloatArray, MatrixManifest]:
    """Read a CSV matrix and check it against its manifest.

    :param path: The CSV path.
    :param role: If given, the manifest role must match.
    :raises ManifestError: On a missing manifest, a role mismatch or a shape mismatch.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"missing matrix file {path}")
    manifest = read_manifest(path)

    if role is not None and manifest.role != role:
        raise ManifestError(
            f"{path} has role '{manifest.role}', expected '{role}'"
        )

    if manifest.cols == 0:
        return np.zeros((manifest.rows, 0)), manifest

    lines = [
        line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()
    ]
    try:
        rows = [[float(cell) for cell in line.split(",")] for line in lines]
    except ValueError as e:
        raise ManifestError(f"{path} contains a non-numeric cell: {e}") from e

    widths = {len(row) for row in rows}
    if len(rows) != manifest.rows or (rows and widths != {manifest.cols}):
        raise ManifestError(
            f"{path} holds {len(rows)} rows with widths {sorted(widths)}, "
            f"manifest declares {manifest.rows}x{manifest.cols}"
        )

    array = np.array(rows, dtype=np.float64).reshape(manifest.rows, manifest.cols)
    _matrix_io_logger.debug(f"Read {array.shape} {manifest.role} matrix from {path}")
    return array, manifest
