"""CLI command clustering vectors with Ward linkage."""
from dataclasses import replace
from pathlib import Path
from typing import Annotated

import typer

from linsem.cli.cli_options import MetricOpt, OutFileOpt, timed
from linsem.cli.rich_output import rich_print_clusters
from linsem.cli.utils import global_options, handle_cli_errors
from linsem.cluster import (
    Metric,
    abs_cosine_dissimilarity,
    cluster_sizes,
    cut_clusters,
    ward_linkage,
    write_dot,
)
from linsem.core.matrix_io import read_matrix
from linsem.pipeline import RunManifest


@timed
def cluster(
    ctx: typer.Context,
    vectors: Annotated[
        Path,
        typer.Option(
            exists=True,
            dir_okay=False,
            help="A d×P CSV whose columns are clustered, e.g. Vhat.csv.",
        ),
    ],
    k: Annotated[int, typer.Option("--k", "-k", help="Number of clusters.", min=1)] = 3,
    metric: MetricOpt = Metric.ABS_COSINE,
    dot: Annotated[
        bool,
        typer.Option(is_flag=True, help="Also write a Graphviz .dot file next to the JSON."),
    ] = False,
    out: OutFileOpt = None,
) -> None:
    """Build a Ward dendrogram of column vectors and cut it into k clusters."""
    options = global_options(ctx)
    with handle_cli_errors():
        data, _ = read_matrix(vectors)
        dendrogram = ward_linkage(abs_cosine_dissimilarity(data, metric))
        labels = cut_clusters(dendrogram, k)
        dendrogram = replace(dendrogram, labels=labels)

        out_file, out_dir = options.resolve_out_file(out, "dendrogram.json")
        out_dir.mkdir(parents=True, exist_ok=True)
        dendrogram.save(out_file)
        if dot:
            write_dot(out_file.with_suffix(".dot"), dendrogram)
        RunManifest.for_inputs(
            command="cluster",
            parameters={"k": k, "metric": metric.value, "dot": dot},
            inputs=[vectors],
        ).write(out_dir)

    rich_print_clusters(labels, cluster_sizes(labels))
