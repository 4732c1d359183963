"""CLI options for linsem."""
from functools import wraps
from pathlib import Path
from time import time
from typing import Annotated, List, Optional

import typer

from linsem.cli.utils import cli_logger
from linsem.cluster import Metric
from linsem.decorr import VarianceTerm
from linsem.localized import UpdateRule
from linsem.oracle import PairStrategy

SeedOpt = Annotated[
    Optional[int],
    typer.Option(
        "--seed",
        help="The seed of every random stream. Overrides the global --seed.",
        min=0,
    ),
]
OutOpt = Annotated[
    Optional[Path],
    typer.Option(
        "--out",
        "-o",
        help="The output directory. Overrides the global --out.",
        file_okay=False,
    ),
]
OutFileOpt = Annotated[
    Optional[Path],
    typer.Option(
        "--out",
        "-o",
        help="The output directory, or the file itself when it has the output's "
        "extension (.json, or .csv for jacobian). Overrides the global --out.",
    ),
]
ThreadsOpt = Annotated[
    int,
    typer.Option("--threads", "-t", help="Worker threads for the Jacobian.", min=1),
]
VerboseOpt = Annotated[
    bool,
    typer.Option(
        "--verbose",
        "-v",
        help="Whether to run in verbose mode.",
    ),
]
QuietOpt = Annotated[
    bool,
    typer.Option("--quiet", "-q", help="Only log warnings and errors."),
]
JsonOpt = Annotated[
    bool,
    typer.Option("--json", is_flag=True, help="Print JSON instead of a table."),
]
RidgeOpt = Annotated[
    float,
    typer.Option("--ridge", help="Ridge added to the normal matrix.", min=0.0),
]
TargetShapeOpt = Annotated[
    Optional[str],
    typer.Option(
        "--target-shape",
        "--shape",
        help="Comma-separated target shape, e.g. 16,16. "
        "Read from the matrix manifest when omitted.",
    ),
]
ConfigOpt = Annotated[
    str,
    typer.Option(
        "--config",
        "-c",
        help="A JSON or YAML run config, or the name of a bundled one.",
    ),
]
StrategyOpt = Annotated[
    PairStrategy,
    typer.Option("--strategy", help="How the two codes of a pair relate."),
]
PerturbationOpt = Annotated[
    float,
    typer.Option(
        "--perturbation", help="Pair spread for the perturbation strategy.", min=0.0
    ),
]
VarianceTermOpt = Annotated[
    VarianceTerm,
    typer.Option("--variance-term", help="Variance penalty reference."),
]
UpdateRuleOpt = Annotated[
    UpdateRule,
    typer.Option("--update-rule", help="How U is updated each iteration."),
]
MetricOpt = Annotated[
    Metric,
    typer.Option("--metric", help="The dissimilarity between vectors."),
]
ThresholdOpt = Annotated[
    float,
    typer.Option("--threshold", help="Columns of U below this norm are removed.", min=0.0),
]
AlphaListOpt = Annotated[
    Optional[List[float]],
    typer.Option("--alpha", help="Sparsity weights to sweep."),
]
BetaListOpt = Annotated[
    Optional[List[float]],
    typer.Option("--beta", help="Orthogonality weights to sweep."),
]
MatrixArg = Annotated[
    Path,
    typer.Option(exists=True, dir_okay=False, help="A matrix CSV with its manifest."),
]
DirArg = Annotated[
    Path,
    typer.Option(exists=True, file_okay=False, help="A directory written by linsem."),
]


def timed[T](fn: T) -> T:
    """Time a function execution."""

    @wraps(fn)  # type: ignore[arg-type]
    def wrapper(*args, **kwargs):
        start = time()
        result = fn(*args, **kwargs)  # type: ignore[operator]
        end = time()
        cli_logger.debug(f"Time elapsed: {end - start}s")
        return result

    return wrapper  # type: ignore[return-value]
