"""Rich rendering of command results."""
from __future__ import annotations

from typing import TYPE_CHECKING, Dict, List, Sequence

from rich import print as rprint
from rich.box import ROUNDED
from rich.panel import Panel
from rich.table import Table

if TYPE_CHECKING:
    from linsem.decorr import DecorrLoss
    from linsem.localized import ComponentSummary, SolveReport
    from linsem.pipeline import Report, SweepRow


RICH_PANEL_OPTS = {
    "box": ROUNDED,
    "title_align": "left",
    "subtitle_align": "right",
}


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.6g}"


def _pass_mark(passed: bool) -> str:
    return "[green]pass[/green]" if passed else "[bright_red]FAIL[/bright_red]"


def rich_print_decorr(loss: DecorrLoss, n_samples: int, dim: int) -> None:
    """Print the parts of a decorrelation loss."""
    table = Table(box=None, show_header=False)
    table.add_row("total", _fmt(loss.total))
    table.add_row("corr_term", _fmt(loss.corr_term))
    table.add_row("var_term", _fmt(loss.var_term))
    table.add_row("clamp_count", str(loss.clamp_count))
    rprint(
        Panel(
            table,
            title="Decorrelation loss",
            subtitle=f"{n_samples}×{dim} batch",
            **RICH_PANEL_OPTS,  # type: ignore
        )
    )


def rich_print_components(
    summary: ComponentSummary, report: SolveReport | None = None, title: str = "Components"
) -> None:
    """Print a component summary and, if given, how the solver ended."""
    table = Table(box=None, show_header=False)
    table.add_row("surviving", str(summary.surviving))
    table.add_row("mean ‖u‖₁", _fmt(summary.mean_l1))
    table.add_row("max |v̂ᵢᵀv̂ⱼ|", _fmt(summary.max_offdiag))
    table.add_row("objective", _fmt(summary.objective))
    subtitle = ""
    if report is not None:
        subtitle = (
            f"{report.iterations_run} iterations, "
            + ("converged" if report.converged else "not converged")
        )
        for warning in report.warnings:
            table.add_row("[yellow]warning[/yellow]", warning)
    rprint(Panel(table, title=title, subtitle=subtitle, **RICH_PANEL_OPTS))  # type: ignore


def rich_print_clusters(labels: Sequence[int], sizes: Sequence[int]) -> None:
    """Print the leaves of every cluster."""
    table = Table("cluster", "size", "leaves", box=ROUNDED)
    for label, size in enumerate(sizes):
        leaves = [str(i) for i, leaf_label in enumerate(labels) if leaf_label == label]
        table.add_row(str(label), str(size), ", ".join(leaves))
    rprint(table)


def rich_print_sweep(rows: Sequence[SweepRow]) -> None:
    """One table row per grid point."""
    table = Table(
        "α", "β", "surviving", "mean ‖u‖₁", "max |v̂ᵢᵀv̂ⱼ|", "objective", box=ROUNDED
    )
    for row in rows:
        table.add_row(
            _fmt(row.alpha),
            _fmt(row.beta),
            str(row.surviving),
            _fmt(row.mean_l1),
            _fmt(row.max_offdiag),
            _fmt(row.objective),
        )
    rprint(Panel(table, title="Sweep", **RICH_PANEL_OPTS))  # type: ignore


def _criteria_table(report: Report) -> Table:
    table = Table("criterion", "value", "bound", "result", box=ROUNDED)
    for criterion in report.criteria:
        table.add_row(
            criterion.name,
            _fmt(criterion.value),
            f"{criterion.comparison} {_fmt(criterion.threshold)}",
            _pass_mark(criterion.passed),
        )
    return table


def _labels_text(labels: List[int] | None) -> str:
    if labels is None:
        return "no clustering"
    groups: Dict[int, List[str]] = {}
    for leaf, label in enumerate(labels):
        groups.setdefault(label, []).append(str(leaf))
    return "\n".join(f"{label}: {', '.join(leaves)}" for label, leaves in groups.items())


def rich_print_report(report: Report) -> None:
    """Print a pipeline report: criteria, solver outcome and cluster labels."""
    passed = sum(c.passed for c in report.criteria)
    rprint(
        Panel(
            _criteria_table(report),
            title=("" if report.passed else "[bright_red]") + "Recovery criteria",
            subtitle=f"{passed}/{len(report.criteria)} passed | seed {report.seed}",
            **RICH_PANEL_OPTS,  # type: ignore
        )
    )

    if report.summary is not None:
        trace = Table("iteration", "total", "recon", "l1", "ortho", box=None)
        for entry in report.objective_trace[-5:]:
            trace.add_row(
                str(entry.iteration),
                _fmt(entry.total),
                _fmt(entry.recon),
                _fmt(entry.l1),
                _fmt(entry.ortho),
            )
        rprint(
            Panel(
                trace,
                title="Objective trace (last entries)",
                subtitle=f"{report.iterations_run} iterations, "
                + ("converged" if report.converged else "not converged"),
                **RICH_PANEL_OPTS,  # type: ignore
            )
        )

    rprint(
        Panel(
            _labels_text(report.cluster_labels),
            title="Cluster labels",
            **RICH_PANEL_OPTS,  # type: ignore
        )
    )
