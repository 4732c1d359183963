"""Running a validated pipeline config end to end."""
from __future__ import annotations

import logging
from pathlib import Path

from linsem.core.errors import InvalidParameterError, StageFailedError
from linsem.pipeline.config import PipelineConfig
from linsem.pipeline.manifest import RunManifest
from linsem.pipeline.report import REPORT_NAME, Report, build_report
from linsem.pipeline.stages import STAGE_RUNNERS, RunContext

__all__ = ["pipeline_run", "stage_dir_name"]

_runner_logger = logging.getLogger("linsem.pipeline.runner")


def stage_dir_name(index: int, stage: str) -> str:
    """``<index>-<stage>``, numbered from 1."""
    return f"{index:02d}-{stage}"


def pipeline_run(
    config: PipelineConfig,
    out_dir: Path,
    workers: int = 1,
    config_path: Path | None = None,
) -> Report:
    """Run every configured stage in order and write ``report.json``.

    The config must already be validated (see :func:`linsem.pipeline.config.load_config`);
    nothing is written before the first stage starts.

    :param config: The run description.
    :param out_dir: Where stage directories and the report go.
    :param workers: Threads for the Jacobian stage.
    :param config_path: The config file, hashed into the top-level manifest.
    :raises StageFailedError: If a stage raises.
    """
    if workers < 1:
        raise InvalidParameterError(f"workers must be positive, got {workers}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(config=config, out_dir=out_dir, workers=workers)

    for index, stage in enumerate(config.stages, start=1):
        stage_dir = out_dir / stage_dir_name(index, stage)
        stage_dir.mkdir(parents=True, exist_ok=True)
        _runner_logger.info(f"Running stage {index}/{len(config.stages)}: {stage}")
        try:
            output = STAGE_RUNNERS[stage](ctx, stage_dir)
        except Exception as e:
            _runner_logger.debug(f"Stage '{stage}' raised {e!r}")
            raise StageFailedError(stage, e) from e
        RunManifest.for_inputs(
            command=f"pipeline:{stage}",
            parameters=output.parameters,
            inputs=output.inputs,
            seed=config.seed,
            base=out_dir,
        ).write(stage_dir)

    report = build_report(ctx)
    report.save(out_dir / REPORT_NAME)
    RunManifest.for_inputs(
        command="pipeline",
        parameters=config.parameters(),
        inputs=[config_path] if config_path is not None else [],
        seed=config.seed,
    ).write(out_dir)
    _runner_logger.info(
        f"Pipeline finished, {sum(c.passed for c in report.criteria)}/"
        f"{len(report.criteria)} criteria passed"
    )
    return report
