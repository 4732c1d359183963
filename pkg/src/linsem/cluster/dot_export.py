"""Graphviz DOT text for a dendrogram."""
from __future__ import annotations

import importlib.resources
import logging
from pathlib import Path
from typing import List, Sequence

import jinja2

from linsem.cluster.cluster_def import Dendrogram
from linsem.core.errors import ShapeMismatchError

__all__ = ["render_dot", "write_dot"]

_dot_logger = logging.getLogger("linsem.cluster.dot")

_PALETTE = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"]


def _load_template() -> jinja2.Template:
    with importlib.resources.as_file(
        importlib.resources.files("linsem.cluster.resources")
    ) as resource_folder:
        with open(resource_folder / "dendrogram.dot.j2", "r") as template_file:
            return jinja2.Template(template_file.read(), trim_blocks=True, lstrip_blocks=True)


def render_dot(
    dendro: Dendrogram,
    names: Sequence[str] | None = None,
    labels: Sequence[int] | None = None,
    title: str = "ward linkage",
) -> str:
    """Render the dendrogram as an undirected DOT graph.

    :param dendro: The dendrogram.
    :param names: One display name per leaf, ``v0 .. v{P-1}`` by default.
    :param labels: Cluster labels used to color the leaves.
    :param title: The graph label.
    """
    leaf_count = dendro.leaf_count
    names = list(names) if names is not None else [f"v{i}" for i in range(leaf_count)]
    labels = labels if labels is not None else dendro.labels
    if len(names) != leaf_count or (labels is not None and len(labels) != leaf_count):
        raise ShapeMismatchError(f"expected {leaf_count} leaf names and labels")

    leaves: List[dict] = [
        {"id": i, "name": names[i], "group": None if labels is None else labels[i]}
        for i in range(leaf_count)
    ]
    merges = [
        {"id": leaf_count + step, "a": m.a, "b": m.b, "height": m.height}
        for step, m in enumerate(dendro.merges)
    ]
    return _load_template().render(
        title=title, leaves=leaves, merges=merges, palette=_PALETTE
    )


def write_dot(path: Path, dendro: Dendrogram, **kwargs) -> None:
    """Write :func:`render_dot` output to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_dot(dendro, **kwargs), encoding="utf-8")
    _dot_logger.debug(f"Wrote dendrogram graph to {path}")
