"""The stacked canonical Jacobian."""
from .jacobian_def import CHUNK_COLUMNS, JacobianMatrix, build_jacobian

__all__ = ["CHUNK_COLUMNS", "JacobianMatrix", "build_jacobian"]
