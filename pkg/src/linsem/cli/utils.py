"""Utility functions for CLI commands."""
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List

import dacite
import typer
import yaml

from linsem.core.errors import ErrorFormatter, InternalError, UserInputError

_package_logger = logging.getLogger("linsem")
cli_logger = logging.getLogger("linsem.cli")

DEFAULT_OUT = Path("linsem-out")

USER_ERROR_EXIT_CODE = 2
INTERNAL_ERROR_EXIT_CODE = 1


@dataclass
class GlobalOptions:
    """Options given before the subcommand.

    :param seed: The default seed of every command.
    :param out: The default output directory of every command.
    :param threads: Worker threads for the Jacobian.
    """

    seed: int | None = None
    out: Path | None = None
    threads: int = 1

    def resolve_out(self, out: Path | None) -> Path:
        """The command's own ``--out``, else the global one, else ``linsem-out``."""
        return out or self.out or DEFAULT_OUT

    def resolve_out_file(self, out: Path | None, default_name: str) -> tuple[Path, Path]:
        """The file to write and the directory its manifest goes to.

        An ``--out`` with the extension of ``default_name`` names the file itself.
        Anything else is a directory that receives ``default_name``.
        """
        target = self.resolve_out(out)
        if target.suffix.lower() == Path(default_name).suffix:
            return target, target.parent
        return target / default_name, target

    def resolve_seed(self, seed: int | None, fallback: int = 0) -> int:
        if seed is not None:
            return seed
        return self.seed if self.seed is not None else fallback


def global_options(ctx: typer.Context) -> GlobalOptions:
    """The options the app callback stored on the context."""
    obj = ctx.find_root().obj
    return obj if isinstance(obj, GlobalOptions) else GlobalOptions()


def _print_error(err: ErrorFormatter) -> None:
    typer.secho(
        typer.style(err.format().rstrip("\n"), fg=typer.colors.RED, bold=True),
        err=True,
    )


@contextmanager
def handle_cli_errors() -> Iterator[None]:
    """Turn linsem errors into a red message on standard error and an exit code.

    Input errors exit with 2, internal errors and stage failures with 1.
    """
    try:
        yield
    except UserInputError as e:
        cli_logger.debug(f"Input error: {e!r}")
        _print_error(e)
        raise typer.Exit(code=USER_ERROR_EXIT_CODE)
    except InternalError as e:
        cli_logger.debug(f"Internal error: {e!r}")
        _print_error(e)
        raise typer.Exit(code=INTERNAL_ERROR_EXIT_CODE)


def load_record[T](cls: type[T], path: Path) -> T:
    """Read a JSON or YAML record into a dataclass, rejecting unknown keys.

    :param cls: The dataclass.
    :param path: The file.
    :raises UserInputError: If the file is missing or does not fit ``cls``.
    """
    if not path.is_file():
        raise UserInputError(f"{path} does not exist")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        return dacite.from_dict(
            cls, data, config=dacite.Config(strict=True, cast=[float])
        )
    except (yaml.YAMLError, dacite.DaciteError, TypeError) as e:
        raise UserInputError(f"cannot read {path}: {e}") from e


def parse_shape(text: str | None) -> List[int]:
    """``"16,16"`` → ``[16, 16]``; nothing → ``[]``."""
    if not text:
        return []
    try:
        shape = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise UserInputError(f"cannot parse target shape '{text}': {e}") from e
    if any(size < 1 for size in shape):
        raise UserInputError(f"target shape sizes must be positive, got {shape}")
    return shape


def setup_root_logger(verbose: bool, quiet: bool = False) -> None:
    """Set up the root logger.

    :param verbose: Whether to run in verbose mode.
    :param quiet: Whether to only show warnings and errors. Loses to ``verbose``.
    """
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    _package_logger.setLevel(level)

    for handler in list(_package_logger.handlers):
        _package_logger.removeHandler(handler)

    ch = logging.StreamHandler()
    ch.setLevel(level)

    # add formatter to ch
    ch.setFormatter(
        logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s (%(filename)s:%(lineno)d)",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )

    # add ch to logger
    _package_logger.addHandler(ch)

    _package_logger.debug(f"Set up root logger with level {level}.")
