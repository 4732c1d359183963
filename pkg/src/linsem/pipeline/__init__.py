"""Configured end-to-end runs, sweeps, manifests and reports."""
from .config import (
    STAGES,
    PipelineConfig,
    SweepGrid,
    load_config,
    parse_config,
    resolve_config_path,
)
from .manifest import RunManifest, verify_manifest
from .report import CriterionResult, Report
from .runner import pipeline_run
from .stages import load_model, save_model
from .sweep import SweepRow, run_sweep, write_sweep_csv

__all__ = [
    "CriterionResult",
    "PipelineConfig",
    "Report",
    "RunManifest",
    "STAGES",
    "SweepGrid",
    "SweepRow",
    "load_config",
    "load_model",
    "parse_config",
    "pipeline_run",
    "resolve_config_path",
    "run_sweep",
    "save_model",
    "verify_manifest",
    "write_sweep_csv",
]
