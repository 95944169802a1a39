# infoflow/workflows/registry.py
# This file contains the WorkflowRegistry mapping CLI verbs to experiment workflows
# Purpose: Register workflow classes under their verbs, describe them, and create instances bound to the application settings. This is NOT for workflow logic.

from dataclasses import dataclass
from typing import Dict, List, Optional, Type

from .base_workflow import ExperimentWorkflow
from .curves_workflow import CurvesWorkflow
from .detection_workflow import DetectionWorkflow
from .estimation_workflow import EstimationWorkflow
from .network_workflow import GenerateWorkflow, SolveWorkflow
from ..utils.config_loader import AppConfig
from ..utils.logger import get_logger
from ..utils.validation import ConfigurationError


@dataclass
class WorkflowInfo:
    """Information about a registered workflow."""
    verb: str
    workflow_class: Type[ExperimentWorkflow]
    task: Optional[str]
    description: str


class WorkflowRegistry:
    """Registry for CLI verbs and their workflows."""

    def __init__(self):
        self._workflows: Dict[str, WorkflowInfo] = {}
        self.logger = get_logger("workflow_registry")

    def register(
        self,
        verb: str,
        workflow_class: Type[ExperimentWorkflow],
        task: Optional[str] = None,
        description: str = "",
    ) -> None:
        """
        Register a workflow class.

        Args:
            verb: CLI verb
            workflow_class: Workflow class
            task: Experiment task the verb requires (None accepts any)
            description: One-line help text
        """
        if verb in self._workflows:
            self.logger.warning(f"Overwriting existing workflow: {verb}")
        self._workflows[verb] = WorkflowInfo(verb, workflow_class, task, description or workflow_class.description)
        self.logger.debug(f"Registered workflow: {verb}")

    def discover(self) -> List[str]:
        return list(self._workflows)

    def get_info(self, verb: str) -> Optional[WorkflowInfo]:
        return self._workflows.get(verb)

    def create(self, verb: str, task: str, settings: Optional[AppConfig] = None) -> ExperimentWorkflow:
        """
        Create the workflow for a verb, checking the config's task.

        Raises:
            ConfigurationError: If the verb is unknown or does not match the task
        """
        info = self._workflows.get(verb)
        if info is None:
            raise ConfigurationError(f"Unknown command '{verb}'. Available: {', '.join(self._workflows)}")
        if info.task is not None and info.task != task:
            raise ConfigurationError(f"'{verb}' needs a config with task '{info.task}', got '{task}'")
        return info.workflow_class(settings)


def default_registry() -> WorkflowRegistry:
    """Registry with every built-in verb."""
    registry = WorkflowRegistry()
    registry.register("generate", GenerateWorkflow)
    registry.register("solve", SolveWorkflow, task="solve")
    registry.register("estimate", EstimationWorkflow, task="estimation")
    registry.register("detect", DetectionWorkflow, task="detection")
    registry.register("curves", CurvesWorkflow, task="curves")
    return registry
