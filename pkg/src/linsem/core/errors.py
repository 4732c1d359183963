"""This module contains the error classes used across linsem."""

import traceback
from textwrap import indent
from typing import Iterable, List, Sequence


class ErrorFormatter(Exception):
    """Base class of every linsem error, carrying a human-readable ``format``."""

    def extract_traceback_str(self, indent_num: int = 0) -> str:
        """Extract the traceback from the exception as a string."""
        return indent(
            "\n".join(traceback.format_tb(self.__traceback__)), " " * indent_num
        )

    def format_args(self, indent_num: int = 0) -> str:
        """Format the arguments of the error message.

        :param indent_num: The number of spaces to indent the message.
        """
        return indent(
            ",\n".join(str(arg).rstrip("\n") for arg in self.args),
            " " * indent_num,
        )

    def format(self) -> str:
        """Format the error message."""
        raise NotImplementedError


class UserInputError(ErrorFormatter, ValueError):
    """Raised when the caller supplied something that can be fixed on their side."""

    def format(self) -> str:
        return f"Invalid input. The reason is following: \n{self.format_args(indent_num=2)}\n"


class InternalError(ErrorFormatter):
    """Raised when a computation fails for reasons the input checks did not catch."""

    def format(self) -> str:
        tb_info = indent(
            tb_str if (tb_str := self.extract_traceback_str()) else "Not Provided\n",
            "  ",
        )
        return (
            f"Internal Error. \n"
            f"The reason is following: \n{self.format_args(indent_num=2)}\n"
            f"Stack Trace: \n{tb_info}"
        )


class InsufficientSamplesError(UserInputError):
    """Raised when a statistic needs more rows than the batch has."""

    def __init__(self, required: int, actual: int):
        super().__init__(required, actual)

    @property
    def required(self) -> int:
        return self.args[0]

    @property
    def actual(self) -> int:
        return self.args[1]

    def format(self) -> str:
        return (
            f"insufficient samples: at least {self.required} rows are required, "
            f"got {self.actual}.\n"
        )

    def __str__(self) -> str:
        return self.format().rstrip("\n")


class ShapeMismatchError(UserInputError):
    """Raised when two arrays that must agree in shape do not."""

    def format(self) -> str:
        return f"Shape mismatch: \n{self.format_args(indent_num=2)}\n"


class InvalidParameterError(UserInputError):
    """Raised when a scalar parameter is out of its admissible range."""

    def format(self) -> str:
        return f"Invalid parameter: \n{self.format_args(indent_num=2)}\n"


class RankDeficientError(UserInputError):
    """Raised when the normal matrix is singular and no ridge was supplied."""

    def __init__(self, rank: int, dim: int, samples: int | None = None):
        super().__init__(rank, dim, samples)

    @property
    def rank(self) -> int:
        return self.args[0]

    @property
    def dim(self) -> int:
        return self.args[1]

    @property
    def samples(self) -> int | None:
        return self.args[2]

    def format(self) -> str:
        if self.samples is not None:
            return (
                f"rank-deficient system, supply ridge "
                f"({self.samples} samples for {self.dim} dimensions, ridge 0 needs more "
                f"samples than dimensions).\n"
            )
        return (
            f"rank-deficient system, supply ridge "
            f"(numerical rank {self.rank} of {self.dim}).\n"
        )

    def __str__(self) -> str:
        return self.format().rstrip("\n")


class ConstantSemanticError(UserInputError):
    """Raised when the regressed direction is exactly zero."""

    def format(self) -> str:
        return "semantic is constant over samples.\n"

    def __str__(self) -> str:
        return self.format().rstrip("\n")


class ZeroNormError(UserInputError):
    """Raised when a vector or column that must be normalizable has zero norm."""

    def __init__(self, what: str, indices: Sequence[int] = ()):
        super().__init__(what, *indices)

    @property
    def what(self) -> str:
        return self.args[0]

    @property
    def indices(self) -> List[int]:
        return list(self.args[1:])

    def format(self) -> str:
        where = f" at column(s) {self.indices}" if self.indices else ""
        return f"Zero-norm {self.what}{where}.\n"

    def __str__(self) -> str:
        return self.format().rstrip("\n")


class NonUnitColumnError(UserInputError):
    """Raised when latent representation columns violate the unit-norm constraint."""

    def __init__(self, indices: Iterable[int], tolerance: float):
        super().__init__(tuple(indices), tolerance)

    @property
    def indices(self) -> List[int]:
        return list(self.args[0])

    @property
    def tolerance(self) -> float:
        return self.args[1]

    def format(self) -> str:
        return (
            f"Columns {self.indices} of the latent representations are not unit "
            f"length (tolerance {self.tolerance}).\n"
        )

    def __str__(self) -> str:
        return self.format().rstrip("\n")


class UnknownDirectionError(UserInputError):
    """Raised when a named semantic direction does not exist in an oracle world."""

    def __init__(self, name: str, known: Iterable[str]):
        super().__init__(name, *known)

    @property
    def name(self) -> str:
        return self.args[0]

    @property
    def known(self) -> List[str]:
        return list(self.args[1:])

    def format(self) -> str:
        return (
            f"Unknown direction '{self.name}'. "
            f"Known directions: {', '.join(self.known) or '<none>'}.\n"
        )

    def __str__(self) -> str:
        return self.format().rstrip("\n")


class ManifestError(UserInputError):
    """Raised when a matrix file disagrees with its manifest."""

    def format(self) -> str:
        return f"Matrix manifest check failed: \n{self.format_args(indent_num=2)}\n"


class ConfigError(UserInputError):
    """Raised when a pipeline or sweep configuration is invalid."""

    def format(self) -> str:
        return f"Invalid configuration: \n{self.format_args(indent_num=2)}\n"


class SolverDivergedError(InternalError):
    """Raised when the localized component iterates or objective stop being finite."""

    def __init__(self, iteration: int, last_terms: object):
        super().__init__(iteration, last_terms)

    @property
    def iteration(self) -> int:
        return self.args[0]

    @property
    def last_terms(self) -> object:
        return self.args[1]

    def format(self) -> str:
        return (
            f"The solver produced non-finite values at iteration {self.iteration}. "
            f"Last finite objective terms: {self.last_terms}. "
            f"Try a smaller learning rate or smaller alpha/beta.\n"
        )


class StageFailedError(InternalError):
    """Raised by the pipeline runner when a stage fails."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(stage, cause)

    @property
    def stage(self) -> str:
        return self.args[0]

    @property
    def cause(self) -> BaseException:
        return self.args[1]

    def format(self) -> str:
        cause = self.cause
        detail = cause.format() if isinstance(cause, ErrorFormatter) else repr(cause)
        return f"Stage '{self.stage}' failed: \n{indent(detail, '  ')}"
