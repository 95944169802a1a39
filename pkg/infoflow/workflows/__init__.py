# infoflow/workflows/__init__.py
# This file marks the workflows directory as a Python package
# Purpose: Expose the experiment config, workflows, reports and the verb registry. This is NOT for workflow implementation.

from .experiment_config import ExperimentConfig, SeedsConfig
from .base_workflow import ExperimentWorkflow, WorkflowState
from .report import ComparisonReport, ReportRow, write_csv
from .estimation_workflow import EstimationWorkflow
from .detection_workflow import DetectionWorkflow
from .curves_workflow import CurvesWorkflow
from .network_workflow import GenerateWorkflow, SolveWorkflow
from .registry import WorkflowInfo, WorkflowRegistry, default_registry

__all__ = [
    "ExperimentConfig",
    "SeedsConfig",
    "ExperimentWorkflow",
    "WorkflowState",
    "ComparisonReport",
    "ReportRow",
    "write_csv",
    "EstimationWorkflow",
    "DetectionWorkflow",
    "CurvesWorkflow",
    "GenerateWorkflow",
    "SolveWorkflow",
    "WorkflowInfo",
    "WorkflowRegistry",
    "default_registry",
]
